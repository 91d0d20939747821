#include <doctest.h>

#include <random>
#include <set>

#include "qecv/oracle.hpp"
#include "qecv/runner.hpp"

using namespace qecv;
using pauli::Gate;
using pauli::PauliSum;
using pauli::PauliTerm;

namespace {

const Gate kAll[] = {Gate::X, Gate::Y, Gate::Z, Gate::H, Gate::S, Gate::T, Gate::CNOT, Gate::CZ, Gate::ISWAP};

PauliTerm random_term(std::mt19937& rng, std::size_t n) {
    PauliTerm t(n);
    const char letters[] = "IXYZ";
    for (std::size_t q = 1; q <= n; ++q) t.set_letter(q, letters[rng() % 4]);
    return t;
}

std::pair<std::size_t, std::size_t> random_pair(std::mt19937& rng, std::size_t n) {
    std::size_t i = rng() % n + 1, j = rng() % n + 1;
    if (i == j) j = i % n + 1;
    return {i, j};
}

PauliSum repeat(Gate g, std::size_t i, std::size_t j, PauliSum p, int times) {
    for (int k = 0; k < times; ++k) p = pauli::conjugate(g, i, j, p);
    return p;
}

}  // namespace

TEST_CASE("conjugation involutions and orders") {
    std::mt19937 rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 2 + rng() % 3;
        PauliSum p(random_term(rng, n));
        auto [i, j] = random_pair(rng, n);
        CAPTURE(p.str());
        for (Gate g : {Gate::H, Gate::X, Gate::Y, Gate::Z, Gate::CNOT, Gate::CZ}) {
            CAPTURE(pauli::gate_name(g));
            CHECK(repeat(g, i, j, p, 2) == p);
        }
        CHECK(repeat(Gate::S, i, 0, p, 4) == p);
        CHECK(repeat(Gate::T, i, 0, p, 8) == p);
        CHECK(repeat(Gate::ISWAP, i, j, p, 4) == p);
    }
}

TEST_CASE("forward conjugation inverts the table") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 3;
        PauliSum p(random_term(rng, n));
        auto [i, j] = random_pair(rng, n);
        Gate g = kAll[rng() % 9];
        CHECK(pauli::conjugate_forward(g, i, j, pauli::conjugate(g, i, j, p)) == p);
    }
}

TEST_CASE("conjugation table agrees with dense matrices") {
    using namespace oracle;
    for (std::size_t n : {1, 2, 3, 4}) {
        std::mt19937 rng(100 + n);
        int trials = n <= 2 ? 60 : 25;
        for (int trial = 0; trial < trials; ++trial) {
            Gate g = kAll[rng() % 9];
            if (n == 1 && pauli::is_two_qubit(g)) continue;
            std::size_t i = 1, j = 0;
            if (pauli::is_two_qubit(g)) std::tie(i, j) = random_pair(rng, n);
            else i = rng() % n + 1;
            PauliTerm p = random_term(rng, n);
            CAPTURE(n);
            CAPTURE(pauli::gate_name(g));
            CAPTURE(p.str());
            auto u = gate_matrix(g, i, j, n);
            CHECK(matmul(adjoint(u), u) == identity_matrix(std::size_t{1} << n));
            auto expect = matmul(adjoint(u), matmul(pauli_matrix(PauliSum(p)), u));
            CHECK(pauli_matrix(pauli::conjugate(g, i, j, PauliSum(p))) == expect);
        }
    }
}

TEST_CASE("symplectic commutation matches matrices") {
    using namespace oracle;
    for (std::size_t n : {1, 2, 3}) {
        std::mt19937 rng(5 + n);
        for (int trial = 0; trial < 120; ++trial) {
            PauliTerm a = random_term(rng, n), b = random_term(rng, n);
            auto ma = pauli_matrix(PauliSum(a)), mb = pauli_matrix(PauliSum(b));
            bool mat = matmul(ma, mb) == matmul(mb, ma);
            auto sa = pauli::symplectic(a), sb = pauli::symplectic(b);
            bool form = false;
            for (std::size_t q = 0; q < n; ++q) form ^= (sa.get(q) && sb.get(n + q)) != (sa.get(n + q) && sb.get(q));
            CAPTURE(a.str());
            CAPTURE(b.str());
            CHECK(pauli::commutes(a, b) == mat);
            CHECK(!form == mat);
        }
    }
}

TEST_CASE("product decomposition round trips") {
    std::mt19937 rng(99);
    const Gate cliffords[] = {Gate::H, Gate::S, Gate::CNOT, Gate::CZ, Gate::X, Gate::Z};
    for (int trial = 0; trial < 500; ++trial) {
        std::size_t n = 2 + rng() % 5;
        std::size_t k = 1 + rng() % n;
        // a commuting independent basis: Clifford images of Z1..Zk
        std::vector<PauliTerm> basis;
        for (std::size_t q = 1; q <= k; ++q) basis.push_back(PauliTerm::from_letters(n, {{q, 'Z'}}));
        for (int step = 0; step < 12; ++step) {
            Gate g = cliffords[rng() % 6];
            auto [i, j] = random_pair(rng, n);
            for (auto& b : basis) b = pauli::conjugate(g, i, j, PauliSum(b)).single();
        }
        for (auto& b : basis) b.sign = cexpr::PhasePoly::zero();
        std::vector<std::size_t> chosen;
        PauliTerm target(n);
        for (std::size_t b = 0; b < k; ++b)
            if (rng() % 2) {
                chosen.push_back(b);
                target = pauli::mul(target, basis[b]);
            }
        auto d = vc::decompose_products(basis, target);
        CHECK(d.factors == chosen);
        PauliTerm rebuilt(n);
        for (auto f : d.factors) rebuilt = pauli::mul(rebuilt, basis[f]);
        if (d.alpha) rebuilt.sign ^= cexpr::PhasePoly::constant(true);
        // alpha relates the product to the unsigned target
        PauliTerm bare = target;
        bare.sign = cexpr::PhasePoly::zero();
        auto diff = pauli::equal_up_to_phase(rebuilt, bare);
        REQUIRE(diff);
        CHECK(diff->is_zero());
    }
}

TEST_CASE("split partition is exhaustive and disjoint for n <= 10") {
    std::mt19937 rng(3);
    for (std::size_t n = 1; n <= 10; ++n) {
        vc::ClassicalVC v;
        for (std::size_t i = 1; i <= n; ++i) v.error_vars.push_back("e_" + std::to_string(i));
        v.universals = v.error_vars;
        std::size_t d = 1 + rng() % 4;
        auto ts = runner::split(v, d, n);
        std::set<std::size_t> ids;
        for (const auto& t : ts) ids.insert(t.id);
        CHECK(ids.size() == ts.size());
        for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
            int hits = 0;
            for (const auto& t : ts) {
                bool match = true;
                for (const auto& [var, val] : t.assignment)
                    if (static_cast<std::int64_t>((mask >> (std::stoul(var.substr(2)) - 1)) & 1u) != val) match = false;
                hits += match;
            }
            CAPTURE(n);
            CAPTURE(mask);
            REQUIRE(hits == 1);
        }
    }
}
