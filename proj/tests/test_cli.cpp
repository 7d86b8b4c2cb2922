#include "doctest.h"

#include "hybridflow/bench_suite.hpp"
#include "hybridflow/cli.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace hybridflow;
namespace fs = std::filesystem;

namespace {

struct Outcome {
	int code;
	std::string out;
	std::string err;
};

Outcome run(std::vector<std::string> args)
{
	args.insert(args.begin(), "hybridflow");
	std::vector<const char*> argv;
	for (const auto& a : args) {
		argv.push_back(a.c_str());
	}
	std::ostringstream out, err;
	const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
	return {code, out.str(), err.str()};
}

/// Scratch directory removed at scope exit.
struct TempDir {
	fs::path path;

	TempDir()
	{
		std::random_device rd;
		path = fs::temp_directory_path() / ("hybridflow_test_" + std::to_string(rd()) + std::to_string(rd()));
		fs::create_directories(path);
	}
	~TempDir() { fs::remove_all(path); }

	std::string file(const std::string& name) const { return (path / name).string(); }

	std::string write(const std::string& name, const std::string& text) const
	{
		std::ofstream(path / name, std::ios::binary) << text;
		return file(name);
	}
};

std::string slurp(const std::string& path)
{
	std::ifstream in(path, std::ios::binary);
	std::ostringstream s;
	s << in.rdbuf();
	return s.str();
}

struct Csv {
	std::vector<std::string> header;
	std::vector<std::vector<double>> rows;

	std::size_t column(const std::string& name) const
	{
		for (std::size_t i = 0; i < header.size(); ++i) {
			if (header[i] == name) {
				return i;
			}
		}
		FAIL("missing column " << name);
		return 0;
	}
};

Csv read_csv(const std::string& path)
{
	Csv c;
	std::istringstream in(slurp(path));
	std::string line;
	bool first = true;
	while (std::getline(in, line)) {
		std::istringstream ls(line);
		std::string cell;
		std::vector<double> row;
		while (std::getline(ls, cell, ',')) {
			if (first) {
				c.header.push_back(cell);
			} else {
				row.push_back(std::stod(cell));
			}
		}
		if (!first) {
			c.rows.push_back(std::move(row));
		}
		first = false;
	}
	return c;
}

const char* qubit_config = R"({
  "units": "hbar=1",
  "model": {
    "name": "explicit",
    "classical": {"kind": "harmonic", "mass": 1.0, "omega": 1.0},
    "quantum": {"hamiltonian": [[0.5, 0.0], [0.0, -0.5]]},
    "initial": {"x": 1.0, "p": 0.0, "psi": [0.7071067811865476, [0.0, 0.7071067811865476]]}
  },
  "integrator": {"method": "implicit_midpoint", "dt": 1e-2, "t_final": 2.0},
  "outputs": {"observables": ["E_cl", "E_qm"], "record_every": 10}
})";

const char* ensemble_config = R"({
  "units": "hbar=1",
  "model": {
    "name": "explicit",
    "classical": {"kind": "harmonic", "mass": 1.0, "omega": 1.0},
    "quantum": {"hamiltonian": [[0.5, 0.0], [0.0, -0.5]]},
    "interaction": [{"lambda": 0.2, "coordinate": "x", "operator": [[0, 1], [1, 0]]}],
    "initial": {"x": 0.0, "p": 0.0, "psi": [1.0, 0.0]}
  },
  "integrator": {"method": "implicit_midpoint", "dt": 1e-2, "t_final": 0.5},
  "ensemble": {
    "count": 64,
    "seed": 7,
    "classical": {"mean": [0.5, 0.0], "covariance": [[0.25, 0.0], [0.0, 0.25]]},
    "components": [
      {"weight": {"logistic": {"x_slope": [2.0], "p_slope": [0.0], "offset": 0.0}}, "state": [1.0, 0.0]},
      {"weight": {"logistic": {"x_slope": [2.0], "p_slope": [0.0], "offset": 0.0, "complement": true}}, "state": [0.6, [0.0, 0.8]]}
    ]
  },
  "outputs": {"observables": [{"name": "sigma_z", "operator": [[1, 0], [0, -1]]}], "record_every": 10}
})";

std::string replace(std::string text, const std::string& from, const std::string& to)
{
	const auto pos = text.find(from);
	REQUIRE(pos != std::string::npos);
	return text.replace(pos, from.size(), to);
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("missing required key exits 2 and names it")
{
	TempDir tmp;
	const auto cfg = tmp.write("c.json", replace(qubit_config, R"("dt": 1e-2, )", ""));
	const auto r = run({"run", "--config", cfg, "--out", tmp.file("o")});
	CHECK(r.code == exit_usage);
	CHECK(r.err.find("integrator.dt") != std::string::npos);
}

TEST_CASE("unknown keys and malformed JSON exit 2")
{
	TempDir tmp;
	auto cfg = tmp.write("c.json", replace(qubit_config, R"("mass")", R"("mas")"));
	auto r = run({"run", "--config", cfg, "--out", tmp.file("o")});
	CHECK(r.code == exit_usage);
	CHECK(r.err.find("model.classical.mas") != std::string::npos);

	cfg = tmp.write("d.json", std::string(qubit_config).substr(0, 80));
	r = run({"run", "--config", cfg, "--out", tmp.file("o")});
	CHECK(r.code == exit_usage);
	CHECK(r.err.find("syntax error") != std::string::npos);

	r = run({"run", "--config", tmp.file("missing.json"), "--out", tmp.file("o")});
	CHECK(r.code == exit_usage);
	CHECK(run({"frobnicate"}).code == exit_usage);
}

TEST_CASE("decoupled run keeps the energy and constraint columns fixed")
{
	TempDir tmp;
	const auto cfg = tmp.write("c.json", qubit_config);
	const auto r = run({"run", "--config", cfg, "--out", tmp.file("o")});
	REQUIRE(r.code == exit_success);
	const auto csv = read_csv(tmp.file("o/series.csv"));
	CHECK(csv.header == std::vector<std::string>{"t", "x", "p", "E", "C", "E_cl", "E_qm"});
	REQUIRE(csv.rows.size() == 21);
	const auto e = csv.column("E");
	const auto c = csv.column("C");
	const auto ecl = csv.column("E_cl");
	const auto eqm = csv.column("E_qm");
	for (const auto& row : csv.rows) {
		CHECK(std::abs(row[e] - csv.rows[0][e]) <= 1e-10);
		CHECK(std::abs(row[c] - 1.0) <= 1e-10);
		CHECK(std::abs(row[ecl] - 0.5) <= 1e-10);
		CHECK(std::abs(row[eqm]) <= 1e-10);
	}
	CHECK(csv.rows.back()[0] == doctest::Approx(2.0));
	const auto report = nlohmann::json::parse(slurp(tmp.file("o/report.json")));
	CHECK(report["mode"] == "trajectory");
	CHECK(report["steps"] == 200);
}

TEST_CASE("manifest records provenance")
{
	TempDir tmp;
	const auto cfg = tmp.write("c.json", qubit_config);
	REQUIRE(run({"run", "--config", cfg, "--out", tmp.file("o")}).code == exit_success);
	const auto m = nlohmann::json::parse(slurp(tmp.file("o/manifest.json")));
	for (const char* key : {"tool", "version", "compiler", "status", "command", "config_path", "config_hash", "seed",
	                        "started_utc", "finished_utc", "wall_clock_seconds", "outputs", "resolved_config"}) {
		CHECK_MESSAGE(m.contains(key), key);
	}
	CHECK(m["status"] == "completed");
	CHECK(m["seed"].is_null());
	CHECK(m["config_hash"].get<std::string>().rfind("fnv1a64:", 0) == 0);
	CHECK(m["wall_clock_seconds"].get<double>() >= 0.0);
	CHECK(m["resolved_config"]["integrator"]["dt"] == 1e-2);

	// Reformatting the file leaves the hash unchanged.
	const auto cfg2 = tmp.write("c2.json", nlohmann::json::parse(qubit_config).dump(8));
	REQUIRE(run({"run", "--config", cfg2, "--out", tmp.file("o2")}).code == exit_success);
	const auto m2 = nlohmann::json::parse(slurp(tmp.file("o2/manifest.json")));
	CHECK(m2["config_hash"] == m["config_hash"]);
}

TEST_CASE("trajectory run reproduces the Ehrenfest benchmark series")
{
	TempDir tmp;
	const auto cfg = tmp.write("c.json", R"({
	  "units": "hbar=1",
	  "model": {"name": "peres-terno", "params": {"lambda": 0.1, "N": 16}},
	  "integrator": {"method": "rk4", "dt": 1e-3, "t_final": 2.0},
	  "outputs": {"observables": ["q_exp", "p_exp"], "record_every": 100}
	})");
	REQUIRE(run({"run", "--config", cfg, "--out", tmp.file("o")}).code == exit_success);
	const auto csv = read_csv(tmp.file("o/series.csv"));

	PeresTernoModel m;
	m.levels = 16;
	IntegratorConfig ic;
	ic.method = IntegratorMethod::rk4;
	const auto ref = ehrenfest_residual(m, 2.0, ic, {.record_every = 100});
	REQUIRE(csv.rows.size() == ref.series.rows.size());
	const auto qi = csv.column("q_exp");
	const auto pi = csv.column("p_exp");
	for (std::size_t k = 0; k < csv.rows.size(); ++k) {
		CHECK(csv.rows[k][qi] == ref.series.rows[k][5]);
		CHECK(csv.rows[k][pi] == ref.series.rows[k][6]);
		CHECK(csv.rows[k][1] == ref.series.rows[k][1]);
	}
}

TEST_CASE("ensemble runs are reproducible from config and seed")
{
	TempDir tmp;
	const auto cfg = tmp.write("e.json", ensemble_config);
	REQUIRE(run({"run", "--config", cfg, "--out", tmp.file("a")}).code == exit_success);
	REQUIRE(run({"run", "--config", cfg, "--out", tmp.file("b")}).code == exit_success);
	CHECK(slurp(tmp.file("a/series.csv")) == slurp(tmp.file("b/series.csv")));
	CHECK(slurp(tmp.file("a/ensemble.json")) == slurp(tmp.file("b/ensemble.json")));

	REQUIRE(run({"run", "--config", cfg, "--out", tmp.file("c"), "--seed", "8"}).code == exit_success);
	CHECK(slurp(tmp.file("a/series.csv")) != slurp(tmp.file("c/series.csv")));
	const auto m = nlohmann::json::parse(slurp(tmp.file("c/manifest.json")));
	CHECK(m["seed"] == 8);

	const auto csv = read_csv(tmp.file("a/series.csv"));
	CHECK(csv.header == std::vector<std::string>{"t", "weight_sum", "x", "x_se", "p", "p_se", "E", "E_se", "C", "C_se",
	                                             "sigma_z", "sigma_z_se"});
	for (const auto& row : csv.rows) {
		CHECK(row[1] == 1.0);
		CHECK(std::abs(row[csv.column("C")] - 1.0) <= 1e-10);
		CHECK(std::abs(row[csv.column("sigma_z")]) <= 1.0);
		CHECK(row[csv.column("sigma_z_se")] > 0.0);
	}

	const auto q = tmp.write("q.json", qubit_config);
	const auto r = run({"run", "--config", q, "--out", tmp.file("d"), "--seed", "3"});
	CHECK(r.code == exit_usage);
}

TEST_CASE("inspect summarises fresh and evolved snapshots")
{
	TempDir tmp;
	const auto cfg = tmp.write("e.json", ensemble_config);
	REQUIRE(run({"run", "--config", cfg, "--out", tmp.file("a")}).code == exit_success);
	for (const char* name : {"a/ensemble_initial.json", "a/ensemble.json"}) {
		const auto r = run({"inspect", tmp.file(name)});
		REQUIRE(r.code == exit_success);
		CHECK(r.out.find("members      64\n") != std::string::npos);
		CHECK(r.out.find("seed         7\n") != std::string::npos);
		CHECK(r.out.find("weight sum   1\n") != std::string::npos);
		CHECK(r.out.find("C mean       1") != std::string::npos);
	}
	CHECK(run({"inspect", tmp.file("a/ensemble.json")}).out.find("time         0.5\n") != std::string::npos);

	const auto text = slurp(tmp.file("a/ensemble.json"));
	const auto bad = tmp.write("bad.json", text.substr(0, text.size() / 2));
	const auto r = run({"inspect", bad});
	CHECK(r.code == exit_usage);
	CHECK(r.err.find("byte") != std::string::npos);
	CHECK(run({"inspect", tmp.file("none.json")}).code == exit_usage);
}

TEST_CASE("bench exit codes")
{
	TempDir tmp;
	auto r = run({"bench", "brackets", "--out", tmp.file("b")});
	CHECK(r.code == exit_success);
	CHECK(r.out.find("PASS") != std::string::npos);
	CHECK(fs::exists(tmp.file("b/report.json")));

	CHECK(run({"bench", "nonsense"}).code == exit_usage);
	CHECK(run({"bench", "brackets", "--set", "nonsense=1"}).code == exit_usage);
	CHECK(run({"bench", "brackets", "--set", "seed=abc"}).code == exit_usage);

	r = run({"bench", "separability", "--set", "lambda=0.1"});
	CHECK(r.code == exit_usage);
	CHECK(r.out.find("NOT APPLICABLE") != std::string::npos);

	r = run({"bench", "peres-terno", "--set", "N=8", "--set", "dt=1e-2"});
	CHECK(r.code == exit_failed);
	CHECK(r.out.find("FAIL") != std::string::npos);
	CHECK(r.out.find("truncation") != std::string::npos);
}

} // TEST_SUITE
