import math

import pytest

import sdfest


def test_example_cells():
    cells = sdfest.cells_from_generator(sdfest.example_generator(), 4)
    assert list(cells.probabilities) == pytest.approx([0.4375, 0.3125, 0.1875, 0.0625])


def test_natural_estimator_on_thirds_lattice():
    cells = sdfest.cells_from_generator(sdfest.example_generator(), 1000)
    counts = sdfest.draw_multinomial(cells, 3000, seed=1)
    est = sdfest.natural_estimator(counts, 1000, 3000)
    assert est.kind == "natural"
    for loc, c in zip(est.cdf.locations, est.jump_counts):
        assert loc == c / 3.0
    assert est.cdf(1e9) == 1.0


def test_grouped_estimator_example():
    counts = sdfest.counts_vector([1, 2, 3, 4])
    est = sdfest.grouped_estimator(counts, sdfest.GroupingScheme.make(4, 2), 10)
    assert est.cdf.locations == pytest.approx([0.6, 1.4])
    assert list(est.counts) == [3, 7]


def test_limit_and_bounds():
    uni = sdfest.uniform_generator()
    assert sdfest.poisson_mixture_cdf(1 / 3, uni, 3.0) == pytest.approx(4 * math.exp(-3), abs=1e-9)
    assert sdfest.optimal_T(40, 3000) == pytest.approx(15.3262, abs=1e-4)
    assert sdfest.mse_bound(40, 3000) == pytest.approx(2.24238, abs=1e-5)
    assert sdfest.optimal_m(1_000_000).m == pytest.approx(15.30, abs=0.01)
    assert sdfest.integer_argmin_mse_bound(10**8, regime=sdfest.MseRegime.large_m) == 97


def test_study_roundtrip():
    cfg = sdfest.StudyConfig()
    cfg.num_cells = 200
    cfg.n = 600
    cfg.m_values = [8, 40]
    cfg.reps = 50
    cfg.poissonized = True
    report = sdfest.run_mse_study(cfg)
    assert len(report.cells) == 6
    for c in report.cells:
        assert abs(c.mse - c.bias**2 - c.variance * 49 / 50) < 1e-12
    assert all(r.passed for r in sdfest.variance_audit(cfg))


def test_errors_map_to_python():
    with pytest.raises(sdfest.ConfigError):
        sdfest.GroupingScheme.make(10, 3)
    with pytest.raises(ValueError):
        sdfest.tokenize("")
    with pytest.raises(sdfest.EncodingError):
        sdfest.tokenize(b"ok \xff")
    with pytest.raises(sdfest.NumericError):
        sdfest.CellModel([0.5, 0.6])


def test_ingest():
    corpus = sdfest.tokenize("a b a")
    assert corpus.n == 3 and corpus.num_words == 2
    est = sdfest.estimate_from_corpus(corpus, 1)
    assert est.estimate.cdf.locations == [1.0]
