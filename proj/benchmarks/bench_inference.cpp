#include <benchmark/benchmark.h>

#include "kinship/network.hpp"
#include "kinship/oobn.hpp"
#include "kinship/oracle.hpp"
#include "kinship/random.hpp"

using namespace kinship;

namespace {

// Markov chain of n binary variables.
Network make_chain(int n) {
    std::vector<DiscreteVariable> vars;
    std::vector<Factor> cpts;
    for (int i = 0; i < n; ++i) {
        std::string id = "x" + std::to_string(i);
        vars.push_back({id, id, 2, {"a", "b"}});
        if (i == 0) {
            cpts.emplace_back(std::vector<std::string>{id}, std::vector<int>{2},
                              std::vector<double>{0.6, 0.4});
        } else {
            cpts.emplace_back(
                std::vector<std::string>{id, "x" + std::to_string(i - 1)},
                std::vector<int>{2, 2}, std::vector<double>{0.9, 0.3, 0.1, 0.7});
        }
    }
    return Network(std::move(vars), std::move(cpts));
}

void BM_FactorProduct(benchmark::State& state) {
    const int card = static_cast<int>(state.range(0));
    Rng rng(1);
    std::vector<double> va(static_cast<std::size_t>(card) * card),
        vb(static_cast<std::size_t>(card) * card);
    for (auto& x : va) x = rng.uniform01() + 0.1;
    for (auto& x : vb) x = rng.uniform01() + 0.1;
    Factor a({"x", "y"}, {card, card}, va);
    Factor b({"y", "z"}, {card, card}, vb);
    for (auto _ : state) benchmark::DoNotOptimize(factor_product(a, b));
}
BENCHMARK(BM_FactorProduct)->Arg(4)->Arg(16)->Arg(64);

void BM_ChainQuery(benchmark::State& state) {
    Network net = make_chain(static_cast<int>(state.range(0)));
    EvidenceAssignment e;
    e.assignments["x0"] = 1;
    const std::string last = "x" + std::to_string(state.range(0) - 1);
    for (auto _ : state) benchmark::DoNotOptimize(query(net, {last}, e));
}
BENCHMARK(BM_ChainQuery)->Arg(8)->Arg(32)->Arg(128);

void BM_EnumerateJoint(benchmark::State& state) {
    Network net = make_chain(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(enumerate_joint(net));
}
BENCHMARK(BM_EnumerateJoint)->Arg(8)->Arg(12)->Arg(16);

void BM_OracleCase(benchmark::State& state) {
    Rng rng(42);
    for (auto _ : state) {
        oracle::Case c = oracle::random_case(rng);
        benchmark::DoNotOptimize(evidence_likelihood(c.network, c.evidence));
    }
}
BENCHMARK(BM_OracleCase);

const char* kTombModel = R"(
class NameEvidence {
  input node hyp : [ntped, other];
  node pattern : [weak, strong] parents (hyp) cpt { 0.2, 0.8; 0.7, 0.3; };
  output node match : [no, yes] parents (pattern) cpt { 0.9, 0.1; 0.25, 0.75; };
}
class Tomb {
  node is_nt : [ntped, other] cpt { 0.5, 0.5; };
  instance a : NameEvidence (hyp = is_nt);
  instance b : NameEvidence (hyp = is_nt);
  instance c : NameEvidence (hyp = is_nt);
}
network Tomb;
)";

void BM_ParseFlatten(benchmark::State& state) {
    const std::string src(kTombModel);
    for (auto _ : state) {
        auto parsed = oobn::parse(src);
        benchmark::DoNotOptimize(oobn::flatten(*parsed.document));
    }
}
BENCHMARK(BM_ParseFlatten);

}  // namespace
