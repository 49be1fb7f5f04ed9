#ifndef ECZ_CLI_HPP
#define ECZ_CLI_HPP

namespace ecz {

// Subcommands: synth, ingest, cluster, stability, diagnose, pca, regress,
// gp, mixreg, kde, cec-eval, report. Exit 0 on success, 1 on usage errors,
// 2 on data or domain errors.
int run_cli(int argc, const char* const* argv);

}  // namespace ecz

#endif
