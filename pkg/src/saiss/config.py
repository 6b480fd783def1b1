"""Run parameters for the surface sampling optimizer."""

from dataclasses import dataclass, replace

from .errors import ConfigError


@dataclass(frozen=True)
class SaissConfig:
    """All tunables of the adaptive sampling method.

    h0 : global target spacing, assumed at the reference curvature.
    tau : curvature-adaptivity weight (0 disables adaptivity).
    kappa_ref : deviation-from-flatness value at which h0 applies.
    c_pot : potential cutoff factor, r* = c_pot * h.
    c_s : density cutoff factor, r_s = c_s * h.
    s_min, s_max : support-measure hysteresis thresholds for particle
        insertion (S < s_min) and fusion (S > s_max).
    packing_a : theoretical area prefactor A_theo = packing_a * h^2
        (mean of hexagonal sqrt(3)/2 and square 1 packing, ~0.933).
    eps_saiss : shared stopping tolerance for the energy relaxation and
        the particle-number loop.
    gamma_min_factor : line-search lower bound gamma_min / gamma_max.
    cfl_factor : step bound gamma_max = cfl_factor * h0 / max |grad|.
    line_search_growth : step multiplier while the energy keeps dropping.
    seed : single seed feeding every random draw of a run.
    """

    h0: float
    tau: float = 0.0
    kappa_ref: float = 0.0
    c_pot: float = 2.5
    c_s: float = 2.0
    s_min: float = 0.7
    s_max: float = 1.25
    packing_a: float = 0.933
    eps_saiss: float = 1e-4
    gamma_min_factor: float = 1e-5
    cfl_factor: float = 0.5
    line_search_growth: float = 2.0
    seed: int = 0
    max_outer: int = 5000
    max_size_sweeps: int = 5
    freeze_after: int = 3
    eps_geom: float = 1e-12

    def __post_init__(self):
        if self.h0 <= 0:
            raise ConfigError("h0 must be positive")
        if self.tau < 0:
            raise ConfigError("tau must be non-negative")
        if self.kappa_ref < 0:
            raise ConfigError("kappa_ref must be non-negative")
        if self.c_pot <= 0 or self.c_s <= 0:
            raise ConfigError("cutoff factors must be positive")
        if not 0 < self.s_min <= 1 < self.s_max:
            raise ConfigError("support thresholds need 0 < s_min <= 1 < s_max")
        if self.packing_a <= 0:
            raise ConfigError("packing_a must be positive")
        if self.eps_saiss < 0:
            raise ConfigError("eps_saiss must be non-negative")
        if not 0 < self.gamma_min_factor < 1:
            raise ConfigError("gamma_min_factor must lie in (0, 1)")
        if self.cfl_factor <= 0:
            raise ConfigError("cfl_factor must be positive")
        if self.line_search_growth <= 1:
            raise ConfigError("line_search_growth must exceed 1")
        if self.max_outer < 1 or self.max_size_sweeps < 1 or self.freeze_after < 1:
            raise ConfigError("iteration caps must be at least 1")

    def with_overrides(self, **kwargs):
        return replace(self, **kwargs)
