#include <gtest/gtest.h>

#include "pgdsdn/csv_io.hpp"
#include "pgdsdn/error.hpp"
#include "pgdsdn/laplacian.hpp"
#include "pgdsdn/preconditioner.hpp"
#include "pgdsdn/solver.hpp"
#include "test_support.hpp"

using namespace pgdsdn;
using namespace pgdsdn::testing;

namespace {

GraphFilter two_by_two() {
    return GraphFilter::from_triplets(single_edge(), {{0, 0, 2}, {0, 1, 1}, {1, 0, 1}, {1, 1, 2}});
}

Eigen::MatrixXd diag_matrix(const DiagonalPreconditioner& p) {
    Eigen::VectorXd d(static_cast<Eigen::Index>(p.size()));
    for (std::size_t i = 0; i < p.size(); ++i) d(static_cast<Eigen::Index>(i)) = p[i];
    return d.asDiagonal();
}

}  // namespace

TEST(PgdaPreconditioner, Examples) {
    auto g = path_graph(3);
    EXPECT_EQ(build_pgda_preconditioner(GraphFilter::identity(g)).diag, (std::vector<double>{1, 1, 1}));
    const auto l = laplacians(g).combinatorial;
    const auto p = build_pgda_preconditioner(l);
    EXPECT_EQ(p.diag, (std::vector<double>{4, 4, 4}));
    EXPECT_EQ(p.kind, DiagonalKind::pgda);
    EXPECT_EQ(p.source_width, 1u);
    EXPECT_EQ(build_pgda_preconditioner(two_by_two()).diag, (std::vector<double>{3, 3}));
}

TEST(PgdaPreconditioner, ZeroFilterRejected) {
    EXPECT_THROW(build_pgda_preconditioner(GraphFilter::from_triplets(path_graph(3), {})), ArgumentError);
}

TEST(SpgdaPreconditioner, Examples) {
    auto g = path_graph(3);
    EXPECT_EQ(build_spgda_preconditioner(laplacians(g).combinatorial).diag, (std::vector<double>{2, 4, 2}));
    EXPECT_EQ(build_spgda_preconditioner(GraphFilter::identity(g)).diag, (std::vector<double>{1, 1, 1}));
    EXPECT_EQ(build_spgda_preconditioner(two_by_two()).diag, (std::vector<double>{3, 3}));
}

TEST(SpgdaPreconditioner, AsymmetricRejectedWithPair) {
    auto g = path_graph(3);
    const auto h = GraphFilter::from_triplets(g, {{0, 0, 1}, {1, 1, 1}, {2, 2, 1}, {1, 2, 0.5}});
    try {
        build_spgda_preconditioner(h);
        FAIL() << "expected ArgumentError";
    } catch (const ArgumentError& e) {
        EXPECT_NE(std::string(e.what()).find("1"), std::string::npos);
    }
}

TEST(NormalizedFilter, Examples) {
    auto g = path_graph(4);
    const auto id = GraphFilter::identity(g);
    EXPECT_EQ(normalized_filter(id, build_spgda_preconditioner(id)).to_dense(), id.to_dense());

    const auto h = two_by_two();
    Eigen::MatrixXd expect(2, 2);
    expect << 2.0 / 3, 1.0 / 3, 1.0 / 3, 2.0 / 3;
    EXPECT_LT((normalized_filter(h, build_spgda_preconditioner(h)).to_dense() - expect).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(NormalizedFilter, LaplacianIsHalfNormalized) {
    Rng rng(12);
    for (int rep = 0; rep < 5; ++rep) {
        auto g = random_connected_graph(25, rng);
        const auto l = laplacians(g);
        const auto hat = normalized_filter(l.combinatorial, build_spgda_preconditioner(l.combinatorial));
        EXPECT_LT((hat.to_dense() - l.normalized.to_dense() / 2.0).cwiseAbs().maxCoeff(), 1e-14);
        EXPECT_EQ(hat.width(), l.combinatorial.width());
    }
}

TEST(Dominance, PgdaHoldsOnRandomFilters) {
    Rng rng(1001);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = 2 + rng.next_u64() % 39;
        auto g = random_connected_graph(n, rng);
        const auto h = random_filter(g, 1 + rep % 3, rng);
        const auto p = build_pgda_preconditioner(h);
        const Eigen::MatrixXd pd = diag_matrix(p);
        const Eigen::MatrixXd hd = h.to_dense();
        EXPECT_GE(sym_eigenvalues(pd * pd - hd.transpose() * hd).minCoeff(), -1e-10);
        for (double v : p.diag) EXPECT_GT(v, 0.0);
        EXPECT_TRUE(check_dominance(h, p, DominanceMode::schur).pass);
        EXPECT_LE(*std::max_element(p.diag.begin(), p.diag.end()), schur_norm(h) + 1e-12);
    }
}

TEST(Dominance, SpgdaHoldsOnPositiveDefiniteFilters) {
    Rng rng(2002);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = 2 + rng.next_u64() % 39;
        auto g = random_connected_graph(n, rng);
        const auto h = random_spd_filter(g, 1 + rep % 3, rng);
        const auto ps = build_spgda_preconditioner(h);
        const auto ph = build_pgda_preconditioner(h);
        EXPECT_GE(sym_eigenvalues(diag_matrix(ps) - h.to_dense()).minCoeff(), -1e-10);
        for (std::size_t i = 0; i < n; ++i) EXPECT_LE(ps[i], ph[i]);
    }
}

TEST(Dominance, SymDiagonalBelowPgdaForAnySymmetricFilter) {
    Rng rng(5);
    for (int rep = 0; rep < 50; ++rep) {
        auto g = random_connected_graph(20, rng);
        const auto h = random_filter(g, 1 + rep % 3, rng, true);
        EXPECT_TRUE(check_dominance(h, build_pgda_preconditioner(h), DominanceMode::diag_chain).pass);
    }
}

TEST(Dominance, PowerCheckAgreesWithDense) {
    Rng rng(8);
    for (int rep = 0; rep < 10; ++rep) {
        auto g = random_connected_graph(15, rng);
        const auto h = random_spd_filter(g, 2, rng);
        const auto pg = check_dominance(h, build_pgda_preconditioner(h), DominanceMode::pgda);
        const auto sp = check_dominance(h, build_spgda_preconditioner(h), DominanceMode::spgda);
        EXPECT_TRUE(pg.pass);
        EXPECT_TRUE(sp.pass);
    }
}

TEST(StrictRadius, BelowOne) {
    Rng rng(3003);
    for (int rep = 0; rep < 30; ++rep) {
        auto g = random_connected_graph(2 + rng.next_u64() % 29, rng);
        const auto h = random_spd_filter(g, 1 + rep % 3, rng);
        for (Method m : {Method::pgda, Method::spgda}) {
            const auto r = power_spectral_radius(iteration_matrix(h, method_params(h, m)));
            EXPECT_LT(r.value, 1.0) << to_string(m);
        }
    }
}

TEST(PreconditionerCsv, RoundTrip) {
    Rng rng(4);
    auto g = random_connected_graph(12, rng);
    const auto p = build_pgda_preconditioner(random_filter(g, 2, rng));
    std::stringstream ss;
    write_preconditioner_csv(ss, p);
    const auto back = read_preconditioner_csv(ss, g);
    EXPECT_EQ(back.diag, p.diag);
    EXPECT_EQ(back.kind, p.kind);
    EXPECT_EQ(back.source_width, p.source_width);
}
