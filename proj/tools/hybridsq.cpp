// hybridsq <config-path>
//
// Exit codes: 0 success, 1 usage or I/O, 2 config error, 3 physics precondition
// violated, 4 numerical failure.

#include <cstdio>
#include <exception>
#include <string>

#include "hybridsq/hybridsq.hpp"

int main(int argc, char** argv) {
  using namespace hybridsq;
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s <config-path>\n", argv[0]);
    return 1;
  }
  const std::string path = argv[1];
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }

  RunConfig cfg;
  try {
    cfg = parse_config(text);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "%s: %s\n", path.c_str(), e.what());
    return 2;
  }

  try {
    write_text_file(cfg.output_path, render_csv(execute(cfg)));
  } catch (const UnstableRegime& e) {
    std::fprintf(stderr, "error: unstable regime: %s\n", e.what());
    return 3;
  } catch (const OverdampedDoublet& e) {
    std::fprintf(stderr, "error: overdamped doublet: %s\n", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: precondition violated: %s\n", e.what());
    return 3;
  } catch (const TruncationError& e) {
    std::fprintf(stderr, "error: truncation not converged: %s\n", e.what());
    return 4;
  } catch (const IntegrationError& e) {
    std::fprintf(stderr, "error: integration failed: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
