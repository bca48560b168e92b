"""The array comparison: reference ULA plus dipole ULA, dipole NULA and
cosine NULA at half-wavelength and two-wavelength average spacing, each
simulated without and with user dropping."""

from __future__ import annotations

from .montecarlo import KpiDataset, ScenarioConfig, run_scenario

__all__ = ["ARRAYS", "sweep_configs", "run_sweep"]

# name -> (array.kind, element.kind, array.davg_wl)
ARRAYS = {
    "iso_ula_0.5": ("ula", "isotropic", 0.5),
    "dipole_ula_0.5": ("ula", "dipole", 0.5),
    "dipole_nula_0.5": ("nula", "dipole", 0.5),
    "cosine_nula_0.5": ("nula", "cosine", 0.5),
    "dipole_ula_2.0": ("ula", "dipole", 2.0),
    "dipole_nula_2.0": ("nula", "dipole", 2.0),
    "cosine_nula_2.0": ("nula", "cosine", 2.0),
}


def sweep_configs(base: ScenarioConfig | None = None) -> dict:
    """``{(array_name, dropping): config}`` derived from ``base``."""
    base = base or ScenarioConfig()
    out = {}
    for name, (kind, element, davg) in ARRAYS.items():
        for dropping in (False, True):
            out[name, dropping] = base.replace(
                array_kind=kind,
                array_file=None,
                element_kind=element,
                array_davg_wl=davg,
                dropping_enabled=dropping,
            )
    return out


def run_sweep(base: ScenarioConfig | None = None, workers: int = 1, verify: bool = False) -> dict:
    """Run every sweep configuration; returns ``{(array_name, dropping): KpiDataset}``."""
    results: dict[tuple[str, bool], KpiDataset] = {}
    for key, cfg in sweep_configs(base).items():
        results[key] = run_scenario(cfg, workers=workers, verify=verify)
    return results
