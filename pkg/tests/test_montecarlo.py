import numpy as np
import pytest

from arraykpi.channel import AoaSet, build_channels
from arraykpi.errors import ConfigurationError, DomainError
from arraykpi.montecarlo import (
    KpiDataset,
    ScenarioConfig,
    build_scenario,
    empirical_cdf,
    ergodic_rates,
    realization_rng,
    run_scenario,
)
from arraykpi.scheduler import channel_correlation

SMALL = ScenarioConfig(mc_trials=300, mc_seed=3)


def assert_same(a: KpiDataset, b: KpiDataset):
    for name in ("phi", "served", "ieg", "bcc", "gscc", "sinr_over_p", "rate", "status"):
        np.testing.assert_array_equal(getattr(a, name), getattr(b, name))


def test_reference_array_ieg_is_one():
    ds = run_scenario(SMALL)
    np.testing.assert_allclose(ds.samples("ieg"), 1.0, rtol=0, atol=1e-12)


def test_single_realization_repeatable():
    cfg = ScenarioConfig(mc_trials=1, mc_seed=99, element_kind="dipole")
    assert_same(run_scenario(cfg), run_scenario(cfg))


def test_seed_changes_draws():
    a = run_scenario(SMALL.replace(mc_trials=5))
    b = run_scenario(SMALL.replace(mc_trials=5, mc_seed=4))
    assert not np.array_equal(a.phi, b.phi)


def test_realization_streams_are_counter_based():
    a = realization_rng(7, 12).uniform(size=3)
    np.testing.assert_array_equal(a, realization_rng(7, 12).uniform(size=3))
    assert not np.array_equal(a, realization_rng(7, 13).uniform(size=3))


def test_independent_of_workers_and_chunking():
    cfg = SMALL.replace(element_kind="cosine", array_kind="nula", array_davg_wl=2.0, dropping_enabled=True)
    base = run_scenario(cfg)
    assert_same(base, run_scenario(cfg, chunk_size=7))
    assert_same(base, run_scenario(cfg, workers=2, chunk_size=100))


def test_verified_identities_hold():
    for kind, elem in (("ula", "dipole"), ("nula", "cosine")):
        run_scenario(SMALL.replace(array_kind=kind, element_kind=elem, mc_trials=100), verify=True)


def test_dropping_served_sets_respect_bound():
    cfg = SMALL.replace(dropping_enabled=True, element_kind="dipole")
    sc = build_scenario(cfg)
    ds = run_scenario(sc)
    assert ds.drop_probability > 0
    for r in range(cfg.mc_trials):
        H = build_channels(sc.layout, sc.element, sc.coupling, sc.ref_layout, AoaSet(ds.phi[r], 0 * ds.phi[r])).H
        idx = np.flatnonzero(ds.served[r])
        assert channel_correlation(H[:, idx]).max(initial=0.0) <= 0.45
    assert np.all(ds.rate[~ds.served] == 0)
    assert np.all(np.isnan(ds.bcc[~ds.served]))


def test_shared_aoas_between_test_and_reference():
    # The IEG of a cosine array equals gamma^2 cos^2(phi) only if both arrays see the same angle.
    ds = run_scenario(SMALL.replace(element_kind="cosine", array_kind="nula", mc_trials=20))
    sc = build_scenario(ds.config)
    np.testing.assert_allclose(ds.ieg, sc.element.gamma**2 * np.cos(ds.phi) ** 2, rtol=1e-12)


def test_singular_rate_small_for_reference_ula():
    ds = run_scenario(ScenarioConfig(mc_trials=2000))
    assert sum(ds.error_counts().values()) / 2000 < 0.01


def test_empirical_cdf_examples():
    F = empirical_cdf([1.0, 2.0, 3.0])
    assert F(2.0) == pytest.approx(2 / 3)
    assert F(0.5) == 0.0
    G = empirical_cdf([3.0, 1.0, 2.0], 0.9)
    assert G(3.0) == pytest.approx(0.9)
    assert G(1e9) == pytest.approx(0.9)
    with pytest.raises(DomainError):
        G.quantile(0.95)
    with pytest.raises(DomainError):
        empirical_cdf([])


def test_empirical_median_uniform():
    F = empirical_cdf(np.random.default_rng(0).uniform(size=10_000))
    assert F.quantile(0.5) == pytest.approx(0.5, abs=0.02)


def test_empirical_cdf_monotone_right_continuous():
    s = np.random.default_rng(1).normal(size=200)
    F = empirical_cdf(np.round(s, 1), 0.8)
    x = np.linspace(-4, 4, 1000)
    assert np.all(np.diff(F(x)) >= 0)
    for v in F.samples[:20]:
        assert F(v) == F(np.nextafter(v, np.inf))
    xs, cs = F.steps()
    assert np.all(np.diff(xs) > 0) and cs[-1] == pytest.approx(0.8)


def test_quantile_inverts_cdf():
    F = empirical_cdf(np.arange(1.0, 11.0), 0.5)
    assert F.quantile(0.25) == 5.0
    assert F(F.quantile(0.25)) >= 0.25


def test_ergodic_rates_constant_sinr():
    ds = run_scenario(ScenarioConfig(mc_trials=3))
    const = KpiDataset(
        ds.config, ds.phi, np.ones_like(ds.served), ds.ieg, ds.bcc, ds.gscc,
        np.full(ds.rate.shape, 1.0), np.full(ds.rate.shape, np.log2(11)), ds.status, ds.cond,
    )
    mean, total = ergodic_rates(const)
    assert mean == pytest.approx(np.log2(11))
    assert total == pytest.approx(8 * np.log2(11))
    # re-evaluation at P_UL = 10 from SINR / P_UL = 1
    assert ergodic_rates(const, 10.0)[0] == pytest.approx(np.log2(11))


def test_ergodic_rates_all_dropped():
    ds = run_scenario(ScenarioConfig(mc_trials=2))
    none = KpiDataset(
        ds.config, ds.phi, np.zeros_like(ds.served), ds.ieg, ds.bcc, ds.gscc,
        ds.sinr_over_p, np.zeros_like(ds.rate), ds.status, ds.cond,
    )
    assert ergodic_rates(none) == (0.0, 0.0)


def test_ergodic_rate_matches_stored_rates():
    ds = run_scenario(SMALL.replace(dropping_enabled=True))
    mean, _ = ergodic_rates(ds)
    assert ergodic_rates(ds, ds.config.p_ul)[0] == pytest.approx(mean, rel=1e-12)


def test_config_validation_names_key():
    with pytest.raises(ConfigurationError, match="ues.k"):
        ScenarioConfig(ues_k=40)
    with pytest.raises(ConfigurationError, match="dropping.threshold"):
        ScenarioConfig(dropping_threshold=0.0)
    with pytest.raises(ConfigurationError, match="array.file"):
        ScenarioConfig(array_kind="file")
