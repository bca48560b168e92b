"""Monte Carlo evaluation of IEG, BCC, SINR and rate statistics.

Every realization draws its own AOAs from a generator seeded by
``SeedSequence(master_seed, spawn_key=(realization_index,))`` (PCG64), so
results do not depend on how realizations are distributed over workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Iterator

import numpy as np

from . import channel, scheduler, zf
from .coupling import CouplingModel, build_mcm
from .elements import ElementKind, ElementModel, make_element
from .errors import (
    ConfigurationError,
    DegenerateChannelError,
    DomainError,
    NumericError,
    SingularChannelError,
)
from .geometry import ArrayLayout, make_nula_tchebyshev, make_ula, read_layout_file

__all__ = [
    "ScenarioConfig",
    "Scenario",
    "KpiRecord",
    "KpiDataset",
    "EmpiricalCdf",
    "build_scenario",
    "run_scenario",
    "empirical_cdf",
    "ergodic_rates",
    "METRICS",
]

METRICS = ("ieg", "bcc", "sinr_over_p", "rate")

STATUS_OK = 0
STATUS_SINGULAR = 1
STATUS_DEGENERATE = 2

IDENTITY_RTOL = 1e-9


@dataclass(frozen=True)
class ScenarioConfig:
    """All knobs of one simulated scenario; lengths are in wavelengths."""

    array_kind: str = "ula"
    array_n: int = 32
    array_davg_wl: float = 0.5
    array_sll_db: float = -20.0
    array_file: str | None = None
    element_kind: str = "isotropic"
    element_dipole_length_wl: float = 0.5
    element_dipole_radius_wl: float = 1e-4
    ref_n: int = 32
    ref_spacing_wl: float = 0.5
    ues_k: int = 8
    ues_sector_deg: float = 120.0
    power_pul_db: float = 10.0
    mc_trials: int = 10_000
    mc_seed: int = 0
    dropping_enabled: bool = False
    dropping_threshold: float = 0.45
    out_dir: str = "results"

    def __post_init__(self):
        def bad(key, msg):
            raise ConfigurationError(f"{key}: {msg}")

        if self.array_kind not in ("ula", "nula", "file"):
            bad("array.kind", f"must be ula, nula or file, got {self.array_kind!r}")
        if self.array_kind == "file" and not self.array_file:
            bad("array.file", "required when array.kind = file")
        if self.array_n < 2:
            bad("array.n", "must be >= 2")
        if not self.array_davg_wl > 0:
            bad("array.davg_wl", "must be positive")
        if not self.array_sll_db < 0:
            bad("array.sll_db", "must be negative")
        try:
            ElementKind(self.element_kind)
        except ValueError:
            bad("element.kind", f"must be isotropic, dipole or cosine, got {self.element_kind!r}")
        if not 0 < self.element_dipole_length_wl < 1:
            bad("element.dipole_length_wl", "must be in (0, 1)")
        if not 0 < self.element_dipole_radius_wl < self.element_dipole_length_wl / 10:
            bad("element.dipole_radius_wl", "must be positive and below length/10")
        if self.ref_n < 2:
            bad("ref.n", "must be >= 2")
        if not self.ref_spacing_wl > 0:
            bad("ref.spacing_wl", "must be positive")
        if self.ues_k < 1:
            bad("ues.k", "must be >= 1")
        if self.array_kind != "file" and self.ues_k > self.array_n:
            bad("ues.k", f"K = {self.ues_k} exceeds N = {self.array_n}")
        if not 0 < self.ues_sector_deg <= 360:
            bad("ues.sector_deg", "must be in (0, 360]")
        if not math.isfinite(self.power_pul_db):
            bad("power.pul_db", "must be finite")
        if self.mc_trials < 1:
            bad("mc.trials", "must be >= 1")
        if self.mc_seed < 0:
            bad("mc.seed", "must be non-negative")
        if not 0 < self.dropping_threshold <= 1:
            bad("dropping.threshold", "must be in (0, 1]")

    @property
    def p_ul(self) -> float:
        return 10 ** (self.power_pul_db / 10)

    @property
    def sector_halfwidth(self) -> float:
        return math.radians(self.ues_sector_deg) / 2

    def replace(self, **changes) -> "ScenarioConfig":
        return ScenarioConfig(**{**asdict(self), **changes})


@dataclass(frozen=True)
class Scenario:
    """Immutable inputs shared by all realizations of a scenario."""

    config: ScenarioConfig
    layout: ArrayLayout
    element: ElementModel
    coupling: CouplingModel | None
    ref_layout: ArrayLayout


def build_scenario(config: ScenarioConfig) -> Scenario:
    """Construct layouts, element model and coupling for ``config``."""
    if config.array_kind == "ula":
        layout = make_ula(config.array_n, config.array_davg_wl)
    elif config.array_kind == "nula":
        layout = make_nula_tchebyshev(config.array_n, config.array_davg_wl, 1.0, config.array_sll_db)
    else:
        layout = read_layout_file(config.array_file)
        if config.ues_k > layout.n_elements:
            raise ConfigurationError(f"ues.k: K = {config.ues_k} exceeds N = {layout.n_elements}")
    element = make_element(
        config.element_kind, config.element_dipole_length_wl, config.element_dipole_radius_wl
    )
    coupling = None
    if element.kind is ElementKind.DIPOLE_HALFWAVE:
        _, coupling = build_mcm(layout, config.element_dipole_length_wl, config.element_dipole_radius_wl)
    ref_layout = make_ula(config.ref_n, config.ref_spacing_wl)
    return Scenario(config, layout, element, coupling, ref_layout)


def realization_rng(master_seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(index,)))


def _check_identities(H, W, ieg_s, bcc_sq, sinr, gscc_s, resid_s, p_ul, n_ref):
    direct = zf.sinr_general(H, W, p_ul / n_ref, 1.0)
    if not np.allclose(direct, sinr, rtol=IDENTITY_RTOL, atol=0):
        raise NumericError(f"direct and decomposed SINR disagree: {direct} vs {sinr}")
    zf_form = p_ul * ieg_s * resid_s
    if not np.allclose(zf_form, sinr, rtol=IDENTITY_RTOL, atol=0):
        raise NumericError(f"ZF SINR disagrees with decomposed SINR: {zf_form} vs {sinr}")
    if not np.allclose(np.diag(bcc_sq) + gscc_s, 1.0, rtol=0, atol=IDENTITY_RTOL):
        raise NumericError("BCC + GSCC != 1")


def _run_one(sc: Scenario, index: int, verify: bool):
    cfg = sc.config
    k = cfg.ues_k
    out = {m: np.full(k, np.nan) for m in ("ieg", "bcc", "gscc", "sinr_over_p", "rate")}
    rng = realization_rng(cfg.mc_seed, index)
    aoas = channel.draw_aoas(rng, k, cfg.sector_halfwidth)
    served = np.ones(k, dtype=bool)
    status, cond = STATUS_OK, np.nan
    try:
        ch = channel.build_channels(sc.layout, sc.element, sc.coupling, sc.ref_layout, aoas)
        out["ieg"] = zf.ieg(ch.H, ch.H_ref)
        if cfg.dropping_enabled:
            served = scheduler.drop_users(ch.H, cfg.dropping_threshold).served
        idx = np.flatnonzero(served)
        Hs = ch.H[:, idx]
        W, cond = zf.zf_combiner(Hs, return_cond=True)
        bcc_sq = np.abs(zf.bcc_matrix(W, Hs)) ** 2
        gscc_s, resid_s = zf.projection_split_all(Hs)
        sinr = zf.sinr_decomposed(out["ieg"][idx], bcc_sq, cfg.p_ul)
        if verify:
            _check_identities(Hs, W, out["ieg"][idx], bcc_sq, sinr, gscc_s, resid_s, cfg.p_ul, ch.n_ref)
        out["bcc"][idx] = np.diag(bcc_sq)
        out["gscc"][idx] = gscc_s
        out["sinr_over_p"][idx] = sinr / cfg.p_ul
        out["rate"][idx] = zf.rate(sinr)
        out["rate"][~served] = 0.0
    except SingularChannelError:
        status = STATUS_SINGULAR
    except DegenerateChannelError:
        status = STATUS_DEGENERATE
    return aoas.phi, served, out, status, cond


def _run_chunk(sc: Scenario, start: int, stop: int, verify: bool):
    rows = [_run_one(sc, i, verify) for i in range(start, stop)]
    phi = np.array([r[0] for r in rows])
    served = np.array([r[1] for r in rows])
    metrics = {m: np.array([r[2][m] for r in rows]) for m in rows[0][2]}
    status = np.array([r[3] for r in rows], dtype=np.int8)
    cond = np.array([r[4] for r in rows])
    return phi, served, metrics, status, cond


@dataclass(frozen=True)
class KpiRecord:
    realization: int
    ue: int
    ieg: float
    bcc: float
    gscc: float
    sinr_over_p: float
    rate: float
    served: bool


@dataclass(frozen=True)
class EmpiricalCdf:
    """Step CDF of served-UE samples with a plateau at ``served_fraction``."""

    samples: np.ndarray
    served_fraction: float = 1.0

    def __post_init__(self):
        s = np.sort(np.asarray(self.samples, dtype=float).ravel())
        if len(s) < 1:
            raise DomainError("an empirical CDF needs at least one sample")
        if not 0 < self.served_fraction <= 1:
            raise DomainError(f"served_fraction must be in (0, 1], got {self.served_fraction}")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    def __call__(self, x):
        n = np.searchsorted(self.samples, x, side="right")
        return self.served_fraction * n / len(self.samples)

    def quantile(self, q):
        """Smallest sample ``x`` with ``F(x) >= q``, for ``0 < q < served_fraction``."""
        q_arr = np.asarray(q, dtype=float)
        if np.any(q_arr >= self.served_fraction) or np.any(q_arr <= 0):
            raise DomainError(
                f"quantile level must be in (0, {self.served_fraction}); the CDF never reaches {q}"
            )
        n = len(self.samples)
        idx = np.ceil(q_arr / self.served_fraction * n - 1e-9).astype(int) - 1
        out = self.samples[np.clip(idx, 0, n - 1)]
        return float(out) if out.ndim == 0 else out

    def steps(self):
        """Distinct sample values and the CDF value at each."""
        x, counts = np.unique(self.samples, return_counts=True)
        return x, self.served_fraction * np.cumsum(counts) / len(self.samples)


def empirical_cdf(samples, served_fraction: float = 1.0) -> EmpiricalCdf:
    return EmpiricalCdf(samples, served_fraction)


@dataclass(frozen=True)
class KpiDataset:
    """Per-UE KPIs of all realizations, arrays of shape ``(trials, K)``.

    Dropped UEs have ``rate = 0`` and NaN for the other KPIs except the IEG.
    Realizations with ``status != 0`` (singular or degenerate channels) hold
    NaN everywhere and are excluded from all statistics.
    """

    config: ScenarioConfig
    phi: np.ndarray
    served: np.ndarray
    ieg: np.ndarray
    bcc: np.ndarray
    gscc: np.ndarray
    sinr_over_p: np.ndarray
    rate: np.ndarray
    status: np.ndarray
    cond: np.ndarray

    @property
    def valid(self) -> np.ndarray:
        return self.status == STATUS_OK

    def error_counts(self) -> dict:
        return {
            "singular": int(np.sum(self.status == STATUS_SINGULAR)),
            "degenerate": int(np.sum(self.status == STATUS_DEGENERATE)),
        }

    @property
    def served_fraction(self) -> float:
        s = self.served[self.valid]
        return float(s.mean()) if s.size else 0.0

    @property
    def drop_probability(self) -> float:
        return 1.0 - self.served_fraction

    def samples(self, metric: str) -> np.ndarray:
        """Served-UE samples of ``metric`` from valid realizations."""
        if metric not in METRICS + ("gscc",):
            raise KeyError(metric)
        mask = self.served & self.valid[:, None]
        return getattr(self, metric)[mask]

    def cdf(self, metric: str) -> EmpiricalCdf:
        return EmpiricalCdf(self.samples(metric), self.served_fraction)

    def records(self) -> Iterator[KpiRecord]:
        for r in range(self.served.shape[0]):
            for u in range(self.served.shape[1]):
                yield KpiRecord(
                    r,
                    u,
                    *(float(getattr(self, m)[r, u]) for m in ("ieg", "bcc", "gscc", "sinr_over_p", "rate")),
                    bool(self.served[r, u]),
                )


def run_scenario(
    config: ScenarioConfig | Scenario,
    workers: int = 1,
    verify: bool = False,
    chunk_size: int = 500,
) -> KpiDataset:
    """Simulate ``config.mc_trials`` independent realizations.

    Args:
        config: Scenario configuration or a prebuilt :class:`Scenario`.
        workers: Number of worker processes; results do not depend on it.
        verify: Check on every realization that the direct SINR, the
            IEG/BCC decomposition and the ZF form agree to 1e-9 relative,
            raising :class:`NumericError` otherwise.
        chunk_size: Realizations per work unit.
    """
    sc = config if isinstance(config, Scenario) else build_scenario(config)
    n = sc.config.mc_trials
    bounds = [(s, min(s + chunk_size, n)) for s in range(0, n, chunk_size)]
    if workers > 1 and len(bounds) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(
                pool.map(
                    _run_chunk,
                    [sc] * len(bounds),
                    [b[0] for b in bounds],
                    [b[1] for b in bounds],
                    [verify] * len(bounds),
                )
            )
    else:
        parts = [_run_chunk(sc, a, b, verify) for a, b in bounds]

    phi = np.concatenate([p[0] for p in parts])
    served = np.concatenate([p[1] for p in parts])
    metrics = {m: np.concatenate([p[2][m] for p in parts]) for m in parts[0][2]}
    status = np.concatenate([p[3] for p in parts])
    cond = np.concatenate([p[4] for p in parts])
    return KpiDataset(sc.config, phi, served, status=status, cond=cond, **metrics)


def ergodic_rates(dataset: KpiDataset, p_ul: float | None = None):
    """Mean per-UE rate and ergodic sum rate ``K * mean``.

    Dropped UEs count with zero rate. ``p_ul`` (linear) re-evaluates the rates
    at another transmit power from the stored ``SINR / P_UL`` samples.
    """
    valid = dataset.valid
    if not valid.any():
        return 0.0, 0.0
    if p_ul is None:
        r = dataset.rate[valid]
    else:
        s = dataset.sinr_over_p[valid]
        r = np.where(dataset.served[valid], np.log2(1.0 + p_ul * np.nan_to_num(s)), 0.0)
    mean = float(r.mean())
    return mean, dataset.served.shape[1] * mean


# Ordered list of config fields, used by the config module.
CONFIG_FIELDS = tuple(f.name for f in fields(ScenarioConfig))
