"""Reference device parameters for the demonstration chip.

Collects the measured chip numbers in one place: 35:65 directional couplers,
0.92 heralded-photon spectral purity modelled with two Schmidt modes, mean
brightness 0.110 pairs per pulse, and lumped detection efficiencies.  The
heralding (idler) channels carry the measured end-to-end transmission of the
counting setup; the interferometer outputs are detected at the nanowire
detector efficiency.
"""

from __future__ import annotations

from .coincidence import ExperimentConfig, standard_config
from .jsa import PumpPulse, RingResonance

THETA_COUPLER = 0.6301  # 35:65 directional couplers
PURITY = 0.92
NBAR = 0.110
ETA_IDLER_1 = 0.0135
ETA_IDLER_2 = 0.0287
ETA_SIGNAL = 0.75
MAX_TOTAL_PAIRS = 10

PUMP_CENTER_NM = 1546.12
PUMP_FWHM_PM = 200.0
PUMP_RES_FWHM_PM = 33.0
SIGNAL_CENTER_NM = 1552.52
SIGNAL_FWHM_PM = 33.0
IDLER_CENTER_NM = 1539.77
IDLER_FWHM_PM = 31.0
FILTER_GHZ = 200.0

REP_RATE_HZ = 50e6
# Two-fold counting-model parameters per source (rates in counts/s, powers mW).
SOURCE1_COUNTING = dict(
    gamma_eff=5.013e6, eta_s=0.0080, eta_i=0.0135,
    beta_s=12.9979e3, beta_i=49.9532e3,
)
SOURCE2_COUNTING = dict(
    gamma_eff=6.130e6, eta_s=0.0111, eta_i=0.0287,
    beta_s=32.2330e3, beta_i=37.3080e3,
)


def reference_config(
    nbar: float = NBAR,
    purity: float = PURITY,
    distinguishable: bool = False,
    max_total_pairs: int = MAX_TOTAL_PAIRS,
) -> ExperimentConfig:
    """Full-model configuration of the demonstration chip."""
    return standard_config(
        purity=purity,
        nbar=nbar,
        theta=THETA_COUPLER,
        eta_idler1=ETA_IDLER_1,
        eta_idler2=ETA_IDLER_2,
        eta_signal_c=ETA_SIGNAL,
        eta_signal_d=ETA_SIGNAL,
        max_total_pairs=max_total_pairs,
        distinguishable=distinguishable,
    )


def reference_jsa_inputs():
    """Pump and resonance parameters of the ring sources."""
    pump = PumpPulse(PUMP_CENTER_NM, PUMP_FWHM_PM)
    pump_res = RingResonance(PUMP_CENTER_NM, PUMP_RES_FWHM_PM)
    signal_res = RingResonance(SIGNAL_CENTER_NM, SIGNAL_FWHM_PM)
    idler_res = RingResonance(IDLER_CENTER_NM, IDLER_FWHM_PM)
    return pump, pump_res, signal_res, idler_res
