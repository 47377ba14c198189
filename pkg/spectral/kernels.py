# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.

# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.

# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <https://www.gnu.org/licenses/>.

import math
import warnings

from scipy import integrate, special

RELATIVE_TOLERANCE = 1e-9
# Outer integral of a quadrature-valued integrand; looser so inner roundoff never trips it
NESTED_TOLERANCE = 1e-7
QUAD_LIMIT = 400
# Beyond |x| = TAIL_CUTOFF the sinc^2 tail is closed-form
TAIL_CUTOFF = 64.0
# Longest stretch handed to a single quad call, in units of x
CHUNK = 32.0
# Below this distance the Dirichlet-squared kernel is replaced by its Taylor expansion
SINGULARITY_RADIUS = 1e-6


class QuadratureError(ArithmeticError):
    """Adaptive quadrature failed to reach the requested tolerance."""


def adaptive_quad(func, lo, hi, points=None, epsrel=RELATIVE_TOLERANCE):
    """Run scipy's adaptive quadrature, promoting any IntegrationWarning to QuadratureError."""
    inner = None
    if points is not None:
        inner = sorted(p for p in set(points) if lo < p < hi) or None
    with warnings.catch_warnings():
        warnings.simplefilter('error', integrate.IntegrationWarning)
        try:
            value, _ = integrate.quad(func, lo, hi, points=inner, epsabs=0.0,
                                      epsrel=epsrel, limit=QUAD_LIMIT)
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(f'quadrature over [{lo}, {hi}] did not converge: {exc}') from exc
    return value


def _sinc_squared(x):
    if x == 0:
        return 1.0
    value = math.sin(math.pi * x) / (math.pi * x)
    return value * value


def _sinc_squared_tail(x):
    """Closed-form integral of sinc^2 from x to infinity, x > 0."""
    si, _ = special.sici(2.0 * math.pi * x)
    return 0.5 - si / math.pi + math.sin(math.pi * x) ** 2 / (math.pi ** 2 * x)


def _sinc_squared_integral(lo, hi):
    """Integral of sinc^2(x) over [lo, hi]; either bound may be infinite."""
    if hi <= lo:
        return 0.0
    if lo < 0 and hi > 0:
        return _sinc_squared_integral(0.0, -lo) + _sinc_squared_integral(0.0, hi)
    if hi <= 0:
        lo, hi = -hi, -lo

    total = 0.0
    if hi > TAIL_CUTOFF and math.isinf(hi):
        total += _sinc_squared_tail(max(lo, TAIL_CUTOFF))
        hi = TAIL_CUTOFF
        if hi <= lo:
            return total

    start = lo
    while start < hi:
        stop = min(start + CHUNK, hi)
        nulls = range(math.floor(start) + 1, math.ceil(stop))
        total += adaptive_quad(_sinc_squared, start, stop, points=list(nulls))
        start = stop
    return total


def ofdm_psd(p_k, symbol_time, f):
    """Power spectral density of one rectangular-pulse OFDM subcarrier.

    Args:
        p_k (float): Subcarrier power in watts.
        symbol_time (float): Symbol duration T_s in seconds.
        f (float): Offset from the subcarrier center in Hz.

    Returns:
        float: p_k * T_s * sinc^2(f * T_s) in W/Hz.
    """
    return p_k * symbol_time * _sinc_squared(f * symbol_time)


def leakage_factor(symbol_time, distance, band):
    """Fraction of a subcarrier's power falling into a band `distance` Hz away.

    Evaluates T_s * integral over [d - B/2, d + B/2] of sinc^2(f T_s) df.

    Args:
        symbol_time (float): Symbol duration T_s in seconds.
        distance (float): Spectral distance d between the subcarrier and the band center in Hz.
        band (float): Width B of the victim band in Hz; may be infinite.

    Raises:
        ValueError: If symbol_time is not positive or band is negative.
        QuadratureError: If quadrature fails to converge.

    Returns:
        float: Leakage fraction in [0, 1].
    """
    if not symbol_time > 0:
        raise ValueError(f'symbol_time must be positive, got `{symbol_time}`')
    if not band >= 0:
        raise ValueError(f'band must be nonnegative, got `{band}`')
    if band == 0:
        return 0.0
    lo = (distance - band / 2) * symbol_time
    hi = (distance + band / 2) * symbol_time
    return min(_sinc_squared_integral(lo, hi), 1.0)


def fejer_kernel(x, fft_size):
    """Dirichlet-squared (Fejer) kernel (sin(N x / 2) / sin(x / 2))^2, 2pi-periodic."""
    x = math.remainder(x, 2.0 * math.pi)
    if abs(x) < SINGULARITY_RADIUS:
        return fft_size ** 2 * (1.0 - (fft_size ** 2 - 1) * x * x / 12.0)
    return (math.sin(fft_size * x / 2.0) / math.sin(x / 2.0)) ** 2


def fejer_smoothed_psd(spectrum, fft_size, omega):
    """PSD seen after an N-point FFT: the PU spectrum smoothed by the Fejer kernel.

    Args:
        spectrum (DigitalSpectrum): Flat PU spectrum on [-pi, pi].
        fft_size (int): FFT size N.
        omega (float): Digital frequency in radians, inside [-pi, pi].

    Raises:
        ValueError: If fft_size < 1 or omega is outside [-pi, pi].

    Returns:
        float: (1 / 2 pi N) * integral of phi_pu(phi) * F_N(omega - phi) dphi.
    """
    if fft_size < 1:
        raise ValueError(f'fft_size must be at least 1, got `{fft_size}`')
    if not -math.pi <= omega <= math.pi:
        raise ValueError(f'omega must lie in [-pi, pi], got `{omega}`')
    if spectrum.level == 0 or spectrum.hi <= spectrum.lo:
        return 0.0

    # Kernel nulls sit at omega + 2 pi m / N
    step = 2.0 * math.pi / fft_size
    breaks = [omega + m * step for m in range(-fft_size, fft_size + 1)]
    value = adaptive_quad(lambda phi: fejer_kernel(omega - phi, fft_size), spectrum.lo, spectrum.hi, points=breaks)
    return spectrum.level * value / (2.0 * math.pi * fft_size)
