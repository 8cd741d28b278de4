#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#ifndef PINGTSVM_CLI_PATH
#error "PINGTSVM_CLI_PATH must point at the pingtsvm_cli binary"
#endif

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RunResult run_cli(const std::string& args) {
  const std::string out_path = "cli_stdout.tmp";
  const std::string err_path = "cli_stderr.tmp";
  const std::string cmd = std::string(PINGTSVM_CLI_PATH) + " " + args + " >" +
                          out_path + " 2>" + err_path;
  const int status = std::system(cmd.c_str());
  RunResult r;
  if (WIFEXITED(status)) r.exit_code = WEXITSTATUS(status);
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return r;
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  out << body;
}

int count_lines(const std::string& text) {
  int n = 0;
  for (const char c : text)
    if (c == '\n') ++n;
  return n;
}

struct TempFiles {
  std::vector<std::string> paths;
  std::string add(const std::string& path) {
    paths.push_back(path);
    return path;
  }
  ~TempFiles() {
    for (const auto& p : paths) std::remove(p.c_str());
  }
};

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("--help").out.find("synth") != std::string::npos);

  SUBCASE("a subcommand is required") {
    const RunResult r = run_cli("");
    CHECK(r.exit_code == 2);
  }
  SUBCASE("unknown generator") {
    const RunResult r = run_cli("synth spirals --out x.tmp");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("spirals") != std::string::npos);
  }
  SUBCASE("tau outside the unit interval") {
    TempFiles tmp;
    run_cli("synth blobs --n 5 --out " + tmp.add("cli_tau.csv"));
    const RunResult r = run_cli("train --train cli_tau.csv --tau 1.5 --model-out " +
                                tmp.add("cli_tau.model"));
    CHECK(r.exit_code == 2);
  }
  SUBCASE("missing required flag") {
    CHECK(run_cli("synth blobs").exit_code == 2);
  }
  SUBCASE("unknown output format") {
    CHECK(run_cli("--format yaml synth blobs --out x.tmp").exit_code == 2);
  }
}

TEST_CASE("synth is seed deterministic") {
  TempFiles tmp;
  const std::string a = tmp.add("cli_synth_a.csv");
  const std::string b = tmp.add("cli_synth_b.csv");
  const std::string c = tmp.add("cli_synth_c.csv");

  CHECK(run_cli("--seed 7 synth blobs --n 12 --out " + a).exit_code == 0);
  CHECK(run_cli("--seed 7 synth blobs --n 12 --out " + b).exit_code == 0);
  CHECK(run_cli("--seed 8 synth blobs --n 12 --out " + c).exit_code == 0);

  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a) != slurp(c));
  CHECK(count_lines(slurp(a)) == 25);  // comment header plus 24 data rows

  SUBCASE("every generator runs") {
    CHECK(run_cli("synth crossplanes --n 6 --out " + a).exit_code == 0);
    CHECK(run_cli("synth moons --n 6 --out " + a).exit_code == 0);
  }
}

TEST_CASE("train, predict and evaluate round trip") {
  TempFiles tmp;
  const std::string data = tmp.add("cli_pipe.csv");
  const std::string model = tmp.add("cli_pipe.model");
  const std::string preds = tmp.add("cli_pipe.preds");

  REQUIRE(run_cli("--seed 3 synth blobs --n 10 --separation 6 --noise 0.5 --out " +
                  data).exit_code == 0);
  REQUIRE(run_cli("--quiet train --train " + data + " --c1 1 --tau 0.5 --model-out " +
                  model).exit_code == 0);

  SUBCASE("predictions go to stdout, one token per row") {
    const RunResult r = run_cli("predict --model " + model + " --data " + data);
    CHECK(r.exit_code == 0);
    CHECK(count_lines(r.out) == 20);
    std::istringstream lines(r.out);
    std::string token;
    while (std::getline(lines, token))
      CHECK((token == "+1" || token == "-1"));
  }
  SUBCASE("predictions go to a file with --out") {
    const RunResult r = run_cli("--quiet predict --model " + model + " --data " +
                                data + " --out " + preds);
    CHECK(r.exit_code == 0);
    CHECK(count_lines(slurp(preds)) == 20);
  }
  SUBCASE("evaluate reports perfect separation in csv") {
    const RunResult r =
        run_cli("--format csv evaluate --model " + model + " --data " + data);
    CHECK(r.exit_code == 0);
    std::istringstream lines(r.out);
    std::string line;
    REQUIRE(std::getline(lines, line));
    CHECK(line == "metric,value");
    int seen = 0;
    while (std::getline(lines, line)) {
      ++seen;
      if (line.rfind("tp,", 0) == 0) CHECK(line == "tp,10");
      if (line.rfind("tn,", 0) == 0) CHECK(line == "tn,10");
      if (line.rfind("accuracy,", 0) == 0) CHECK(line == "accuracy,1");
      if (line.rfind("f1,", 0) == 0) CHECK(line == "f1,1");
    }
    CHECK(seen == 9);
  }
  SUBCASE("evaluate emits one json object per metric") {
    const RunResult r =
        run_cli("--format jsonl evaluate --model " + model + " --data " + data);
    CHECK(r.exit_code == 0);
    CHECK(count_lines(r.out) == 9);
    std::istringstream lines(r.out);
    std::string line;
    while (std::getline(lines, line)) {
      REQUIRE(!line.empty());
      CHECK(line.front() == '{');
      CHECK(line.back() == '}');
    }
    CHECK(r.out.find("\"metric\":\"accuracy\",\"value\":1") != std::string::npos);
  }
  SUBCASE("unknown positive label is a usage error") {
    const RunResult r = run_cli("evaluate --model " + model + " --data " + data +
                                " --positive-label amber");
    CHECK(r.exit_code == 2);
  }
}

TEST_CASE("predict rejects mismatched feature counts") {
  TempFiles tmp;
  const std::string data = tmp.add("cli_dim.csv");
  const std::string wide = tmp.add("cli_dim_wide.csv");
  const std::string model = tmp.add("cli_dim.model");

  REQUIRE(run_cli("synth blobs --n 6 --out " + data).exit_code == 0);
  REQUIRE(run_cli("--quiet train --train " + data + " --model-out " + model)
              .exit_code == 0);
  write_file(wide, "1.0,2.0,3.0,+1\n-1.0,0.5,0.25,-1\n");

  const RunResult r = run_cli("predict --model " + model + " --data " + wide);
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("features") != std::string::npos);
}

TEST_CASE("data failures exit with code 1") {
  TempFiles tmp;
  const std::string bad = tmp.add("cli_bad.csv");
  const std::string model = tmp.add("cli_bad.model");
  write_file(bad, "1.0,2.0,+1\nnot-a-number,2.0,-1\n");

  const RunResult r = run_cli("train --train " + bad + " --model-out " + model);
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("line 2") != std::string::npos);

  SUBCASE("corrupted model file") {
    REQUIRE(run_cli("synth blobs --n 5 --out " + bad).exit_code == 0);
    REQUIRE(run_cli("--quiet train --train " + bad + " --model-out " + model)
                .exit_code == 0);
    std::string body = slurp(model);
    const auto pos = body.find("norm1:");
    REQUIRE(pos != std::string::npos);
    body[pos + 8] = body[pos + 8] == '1' ? '2' : '1';
    write_file(model, body);
    const RunResult tampered =
        run_cli("predict --model " + model + " --data " + bad);
    CHECK(tampered.exit_code == 1);
    CHECK(tampered.err.find("checksum") != std::string::npos);
  }
}

TEST_CASE("custom label vocabularies flow through the pipeline") {
  TempFiles tmp;
  const std::string data = tmp.add("cli_vocab.csv");
  const std::string model = tmp.add("cli_vocab.model");
  write_file(data,
             "2.9,3.1,busy\n3.2,2.7,busy\n3.05,3.3,busy\n"
             "-3.0,-2.8,free\n-2.7,-3.2,free\n-3.1,-3.05,free\n");

  REQUIRE(run_cli("--quiet train --train " + data + " --model-out " + model)
              .exit_code == 0);

  SUBCASE("predictions echo the training vocabulary") {
    const RunResult r = run_cli("predict --model " + model + " --data " + data);
    CHECK(r.exit_code == 0);
    std::istringstream lines(r.out);
    std::string token;
    std::vector<std::string> tokens;
    while (std::getline(lines, token)) tokens.push_back(token);
    REQUIRE(tokens.size() == 6);
    for (int i = 0; i < 3; ++i) CHECK(tokens[i] == "busy");
    for (int i = 3; i < 6; ++i) CHECK(tokens[i] == "free");
  }
  SUBCASE("novel tokens need --label entries") {
    const std::string renamed = tmp.add("cli_vocab2.csv");
    write_file(renamed, "2.9,3.1,hot\n-3.0,-2.8,cold\n");
    CHECK(run_cli("train --train " + renamed + " --model-out " + model)
              .exit_code == 1);
    CHECK(run_cli("--quiet train --train " + renamed +
                  " --label hot=+1 --label cold=-1 --model-out " + model)
              .exit_code == 0);
  }
  SUBCASE("positive-label picks the positive side") {
    const std::string flipped = tmp.add("cli_vocab3.model");
    REQUIRE(run_cli("--quiet train --train " + data +
                    " --positive-label free --model-out " + flipped)
                .exit_code == 0);
    const RunResult r = run_cli("predict --model " + flipped + " --data " + data);
    CHECK(r.exit_code == 0);
    // Same geometry, same tokens; only the internal sign convention moved.
    std::istringstream lines(r.out);
    std::string token;
    std::vector<std::string> tokens;
    while (std::getline(lines, token)) tokens.push_back(token);
    REQUIRE(tokens.size() == 6);
    for (int i = 0; i < 3; ++i) CHECK(tokens[i] == "busy");
    for (int i = 3; i < 6; ++i) CHECK(tokens[i] == "free");
  }
}

TEST_CASE("sigma conventions describe the same kernel") {
  TempFiles tmp;
  const std::string data = tmp.add("cli_sigma.csv");
  const std::string width_model = tmp.add("cli_sigma_w.model");
  const std::string inverse_model = tmp.add("cli_sigma_i.model");

  REQUIRE(run_cli("synth moons --n 8 --noise 0.05 --out " + data).exit_code == 0);
  // width 0.5 and inverse 2 denote exp(-|x-y|^2 / 0.5) both.
  REQUIRE(run_cli("--quiet train --train " + data +
                  " --kernel gaussian --sigma 0.5 --model-out " + width_model)
              .exit_code == 0);
  REQUIRE(run_cli("--quiet train --train " + data +
                  " --kernel gaussian --sigma-convention inverse --sigma 2 "
                  "--model-out " + inverse_model)
              .exit_code == 0);
  CHECK(slurp(width_model) == slurp(inverse_model));
}

TEST_CASE("gridsearch output is reproducible and names the winner") {
  TempFiles tmp;
  const std::string data = tmp.add("cli_grid.csv");
  REQUIRE(run_cli("--seed 5 synth blobs --n 8 --separation 5 --noise 0.8 --out " +
                  data).exit_code == 0);

  const std::string args = "--format csv --seed 11 gridsearch --train " + data +
                           " --c-grid 0.5,2 --tau-grid 0.5,1 --folds 2";
  const RunResult first = run_cli(args);
  REQUIRE(first.exit_code == 0);
  const RunResult second = run_cli(args);
  CHECK(first.out == second.out);
  CHECK(first.out.find("rank,c1,c2,sigma,tau,mean_accuracy") == 0);
  CHECK(first.out.find("# best: kernel=linear") != std::string::npos);
  CHECK(count_lines(first.out) == 6);  // header + 4 tuples + best line

  SUBCASE("jsonl appends a best record") {
    const RunResult r = run_cli("--format jsonl --seed 11 gridsearch --train " +
                                data + " --c-grid 0.5,2 --tau-grid 0.5 --folds 2");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("\"record\":\"best\"") != std::string::npos);
    std::istringstream lines(r.out);
    std::string line;
    while (std::getline(lines, line)) {
      REQUIRE(!line.empty());
      CHECK(line.front() == '{');
      CHECK(line.back() == '}');
    }
  }
  SUBCASE("bad grid values are usage errors") {
    CHECK(run_cli("gridsearch --train " + data + " --c-grid 0").exit_code == 2);
    CHECK(run_cli("gridsearch --train " + data + " --tau-grid 2").exit_code == 2);
  }
}

TEST_CASE("bench scenarios rerun byte identically") {
  TempFiles tmp;
  const std::string out_a = tmp.add("cli_bench_a.csv");
  const std::string out_b = tmp.add("cli_bench_b.csv");
  const std::string base =
      "--format csv bench --scenario tau-sweep --generator blobs --n 10 "
      "--separation 6 --noise 0.5 --seeds 1,2 --taus 0,0.5 --label-noise 0.1 "
      "--kernel linear --c-grid 1 --folds 2";

  CHECK(run_cli(base + " --out " + out_a).exit_code == 0);
  CHECK(run_cli(base + " --out " + out_b).exit_code == 0);
  const std::string a = slurp(out_a);
  CHECK(!a.empty());
  CHECK(a == slurp(out_b));
  CHECK(a.find("tau,mean_accuracy") == 0);

  SUBCASE("scenario name is validated") {
    CHECK(run_cli("bench --scenario warp").exit_code == 2);
  }
  SUBCASE("taus outside the unit interval are usage errors") {
    CHECK(run_cli("bench --scenario tau-sweep --taus 0,1.5 --seeds 1").exit_code ==
          2);
  }
}
