"""Long-memory parameter estimation: GPH, wavelet log-periodogram and its LAD variant."""

__version__ = "0.1.0"

from .datagen import (GenConfig, TimeSeries, arfima_1_d_0, fractional_noise, log_squared,
                      lmsv_series, pochhammer_weight)
from .estimators import (MemoryEstimate, SpectralCurvature, bandwidth_grid, estimate,
                         estimate_gph, estimate_nkk, estimate_wblp, optimal_bandwidth)
from .spectra import (Periodogram, nkk_periodogram, ordinary_periodogram,
                      wavelet_ols_periodogram)
from .wavelet import WaveletCoefficients, haar_dwt_finest, max_scale

__all__ = [
    "GenConfig", "TimeSeries", "arfima_1_d_0", "fractional_noise", "log_squared",
    "lmsv_series", "pochhammer_weight", "MemoryEstimate", "SpectralCurvature",
    "bandwidth_grid", "estimate", "estimate_gph", "estimate_nkk", "estimate_wblp",
    "optimal_bandwidth", "Periodogram", "nkk_periodogram", "ordinary_periodogram",
    "wavelet_ols_periodogram", "WaveletCoefficients", "haar_dwt_finest", "max_scale",
]
