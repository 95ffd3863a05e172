"""Uplink pilot transmission, channel estimation, and pilot power control.

Two pilot assignments are supported:

* ``per-user``: the same K orthogonal sequences are reused in every cell, so a
  matched-filter estimate of one user's channel also picks up the same-index
  user of every other cell (pilot contamination).
* ``per-cell``: all K users of a cell share one sequence and different cells
  get orthogonal sequences, so each BS estimates the composite channel of its
  own users only; cross-cell leakage is exactly zero in the synchronous case.

Pilot rows come from the unitary DFT matrix: exactly orthonormal at any
length and constant modulus.

The module also models asynchronous pilot arrival: a propagation-delay offset
smears each received pilot symbol into a weighted sum of two consecutive
transmitted symbols, which breaks orthogonality and reintroduces both a
scaling loss and cross-cell contamination.
"""

from dataclasses import dataclass

import numpy as np

from .channel import ChannelState, complex_gaussian
from .seeding import make_rng

ASSIGNMENTS = ("per-user", "per-cell")

_GRAM_TOL = 1e-12


def make_orthogonal_pilots(count: int, length: int) -> np.ndarray:
    """First ``count`` rows of the unitary DFT matrix of size ``length``.

    Rows are unit norm and mutually orthogonal for any count <= length.
    """
    if count > length:
        raise ValueError(f"cannot fit {count} orthogonal sequences in length {length}")
    if count < 1:
        raise ValueError("count must be >= 1")
    r = np.arange(count)[:, None]
    m = np.arange(length)[None, :]
    return np.exp(-2j * np.pi * r * m / length) / np.sqrt(length)


@dataclass(frozen=True)
class PilotBook:
    """Orthonormal pilot sequences plus per-user transmit powers.

    ``sequences`` is (R, L) with orthonormal rows.  In ``per-user`` mode row k
    is shared by user k of every cell (R = K); in ``per-cell`` mode row i is
    shared by all users of cell i (R = N).  ``powers[i, k]`` is the pilot
    power of user k in cell i, bounded by ``peak_power``.
    """

    sequences: np.ndarray
    assignment: str
    powers: np.ndarray
    peak_power: float

    def __post_init__(self):
        if self.assignment not in ASSIGNMENTS:
            raise ValueError(f"unknown pilot assignment {self.assignment!r}")
        gram = self.sequences @ self.sequences.conj().T
        if np.max(np.abs(gram - np.eye(self.sequences.shape[0]))) > _GRAM_TOL:
            raise ValueError("pilot rows are not orthonormal")
        if self.peak_power <= 0:
            raise ValueError("peak_power must be positive")
        if np.any(self.powers <= 0) or np.any(
            self.powers > self.peak_power * (1 + 1e-12)
        ):
            raise ValueError("pilot powers must lie in (0, peak_power]")
        n_cells, n_users = self.powers.shape
        required = n_users if self.assignment == "per-user" else n_cells
        if self.sequences.shape[0] < required:
            raise ValueError(
                f"{self.assignment} assignment needs {required} sequences, "
                f"got {self.sequences.shape[0]}"
            )

    @property
    def length(self) -> int:
        return self.sequences.shape[1]

    def row_for(self, cell: int, user: int) -> np.ndarray:
        if self.assignment == "per-user":
            return self.sequences[user]
        return self.sequences[cell]


def make_pilot_book(
    assignment: str,
    num_cells: int,
    users_per_cell: int,
    length: int,
    peak_power: float,
    powers=None,
) -> PilotBook:
    """Convenience constructor; ``powers=None`` puts every user at peak power."""
    count = users_per_cell if assignment == "per-user" else num_cells
    if powers is None:
        powers = np.full((num_cells, users_per_cell), float(peak_power))
    return PilotBook(
        sequences=make_orthogonal_pilots(count, length),
        assignment=assignment,
        powers=np.asarray(powers, dtype=float),
        peak_power=float(peak_power),
    )


@dataclass(frozen=True)
class AsyncProfile:
    """Propagation delays of the pilot arrivals, relative to each receiver.

    ``delays_s[i, l, k]`` is the arrival delay at BS i of the pilot from user
    k in cell l; ``reference_delays_s[i]`` is the matched-filter timing at
    BS i.  The sub-symbol offset and whole-symbol shift of each arrival are
    ``divmod(delay - reference, symbol_duration)``.
    """

    delays_s: np.ndarray  # (N, N, K)
    reference_delays_s: np.ndarray  # (N,)
    symbol_duration_s: float

    def __post_init__(self):
        if self.symbol_duration_s <= 0:
            raise ValueError("symbol_duration_s must be positive")

    @classmethod
    def from_user_offsets(cls, offsets_s, symbol_duration_s: float) -> "AsyncProfile":
        """Profile where user (l, k) arrives ``offsets_s[l, k]`` late at every BS."""
        offsets = np.asarray(offsets_s, dtype=float)
        n = offsets.shape[0]
        return cls(
            delays_s=np.broadcast_to(offsets, (n,) + offsets.shape).copy(),
            reference_delays_s=np.zeros(n),
            symbol_duration_s=float(symbol_duration_s),
        )

    def offset_and_shift(self, i: int, l: int, k: int) -> tuple[float, int]:
        shift, offset = divmod(
            self.delays_s[i, l, k] - self.reference_delays_s[i],
            self.symbol_duration_s,
        )
        return float(offset), int(shift)


def pulse_correlation(offset_s: float, symbol_duration_s: float) -> float:
    """Autocorrelation of the unit-energy rectangular pulse at lag ``offset_s``.

    Closed form (1 - offset/T) on [0, T]; the overlap of two unit-energy
    rectangles of duration T shifted by the offset.
    """
    if offset_s < 0 or offset_s > symbol_duration_s:
        raise ValueError("offset must lie in [0, symbol_duration]")
    return (symbol_duration_s - offset_s) / symbol_duration_s


def polluted_pilot(sequence, offset_s: float, shift: int, symbol_duration_s: float):
    """Pilot sequence as seen after a mistimed matched filter.

    Element m becomes rho(offset)*seq[m + shift] + rho(T - offset)*seq[m +
    shift - 1]; indices outside the pilot block read as zero (silence before
    and after the block).
    """
    seq = np.asarray(sequence)
    length = seq.shape[0]
    rho_a = pulse_correlation(offset_s, symbol_duration_s)
    rho_b = pulse_correlation(symbol_duration_s - offset_s, symbol_duration_s)
    out = np.zeros(length, dtype=complex)
    idx = np.arange(length)
    a = idx + shift
    b = a - 1
    ok_a = (a >= 0) & (a < length)
    ok_b = (b >= 0) & (b < length)
    out[ok_a] += rho_a * seq[a[ok_a]]
    out[ok_b] += rho_b * seq[b[ok_b]]
    return out


def uplink_rx(
    channels: ChannelState,
    book: PilotBook,
    cell: int,
    noise_sigma_p2: float,
    rng_seed,
    async_profile: AsyncProfile | None = None,
) -> np.ndarray:
    """Received pilot block at the given BS, shape (M, L).

    Every user of every cell transmits its assigned sequence scaled by
    sqrt(power * L); the BS antenna array superimposes them through the
    channel vectors and adds white noise of per-entry variance
    ``noise_sigma_p2``.  With an ``async_profile`` the sequences are replaced
    by their delay-polluted versions as seen by this BS.
    """
    n, k_users = channels.num_cells, channels.users_per_cell
    m = channels.antennas
    rows = np.empty((n, k_users, book.length), dtype=complex)
    for l in range(n):
        for k in range(k_users):
            row = book.row_for(l, k)
            if async_profile is not None:
                offset, shift = async_profile.offset_and_shift(cell, l, k)
                row = polluted_pilot(
                    row, offset, shift, async_profile.symbol_duration_s
                )
            rows[l, k] = row
    scale = np.sqrt(book.powers * book.length)  # (N, K)
    g = np.sqrt(channels.beta[cell])[..., None] * channels.h[cell]  # (N, K, M)
    y = np.einsum("lkm,lkt->mt", g, scale[..., None] * rows)
    if noise_sigma_p2 > 0:
        y = y + complex_gaussian(make_rng(rng_seed), (m, book.length), noise_sigma_p2)
    return y


def estimate_individual(y: np.ndarray, book: PilotBook, user: int) -> np.ndarray:
    """Matched-filter estimate of one user's channel from a per-user pilot block.

    Correlating with the user's sequence recovers sqrt(p*L) times the sum of
    that pilot index's channels from every cell, plus noise: the estimate is
    contaminated by the same-index users of all other cells.
    """
    if book.assignment != "per-user":
        raise ValueError("individual estimation requires a per-user pilot book")
    if not 0 <= user < book.sequences.shape[0]:
        raise ValueError(f"unknown user index {user}")
    return y @ book.sequences[user].conj()


def estimate_composite(y: np.ndarray, book: PilotBook, cell: int) -> np.ndarray:
    """Composite-channel estimate for one cell from a per-cell pilot block.

    Correlating with the cell's own sequence returns the power-weighted sum of
    that cell's user channels plus noise, with no other-cell component.
    """
    if book.assignment != "per-cell":
        raise ValueError("composite estimation requires a per-cell pilot book")
    return y @ book.sequences[cell].conj()


def optimal_pilot_powers(betas, peak_power: float) -> np.ndarray:
    """Max-min-optimal pilot powers: p_k = (beta_min / beta_k)^2 * peak.

    The weakest user transmits at exactly the peak power and every product
    beta_k^2 * p_k comes out equal, which equalizes the per-user SINRs of the
    composite scheme.
    """
    betas = np.asarray(betas, dtype=float)
    if np.any(betas <= 0) or peak_power <= 0:
        raise ValueError("gains and peak_power must be positive")
    b_min = betas.min()
    return (b_min / betas) ** 2 * peak_power


def maxmin_pilot_powers_oracle(
    betas,
    peak_power: float,
    sigma_p2: float,
    omega: int,
    grid_step: float,
) -> np.ndarray:
    """Brute-force reference solver for the max-min pilot power problem.

    Exhaustive search over a multiplicative grid on [grid_step, peak_power]
    per user (12 points per decade, so consecutive candidates differ by about
    21%), maximizing min_k beta_k^2 p_k / (sum_k' beta_k' p_k' + sigma_p2 /
    omega).  The closed-form candidate powers are injected into each axis so
    the comparison against the analytic rule is not limited by grid
    resolution.  Exponential cost limits this to K <= 4.
    """
    betas = np.asarray(betas, dtype=float)
    k = betas.shape[0]
    if k > 4:
        raise ValueError("oracle grid search supports at most 4 users")
    if grid_step <= 0 or grid_step > peak_power:
        raise ValueError("grid_step must lie in (0, peak_power]")
    decades = np.log10(peak_power / grid_step)
    n_points = max(2, int(np.ceil(12 * decades)) + 1)
    base = np.geomspace(grid_step, peak_power, n_points)
    analytic = optimal_pilot_powers(betas, peak_power)
    axes = [np.unique(np.append(base, analytic[j])) for j in range(k)]
    mesh = np.meshgrid(*axes, indexing="ij")
    p = np.stack([m.ravel() for m in mesh], axis=-1)  # (grid, K)
    denom = p @ betas + sigma_p2 / omega
    objective = np.min(betas**2 * p, axis=1) / denom
    return p[np.argmax(objective)]


def async_kappas(book: PilotBook, profile: AsyncProfile, cell: int) -> np.ndarray:
    """Correlations of each delay-polluted pilot with the receiver's own pilot.

    Returns ``kappa[l, k]`` for receiving BS ``cell``: the inner product of
    the polluted sequence of user (l, k) with the conjugated sequence of cell
    ``cell``.  In-cell values below one mean scaling loss; nonzero out-of-cell
    values mean the cross-cell contamination that synchronous orthogonality
    would have removed.  |kappa| <= 1 always.
    """
    if book.assignment != "per-cell":
        raise ValueError("asynchrony analysis requires a per-cell pilot book")
    n, k_users = profile.delays_s.shape[1], profile.delays_s.shape[2]
    own = book.sequences[cell].conj()
    kappa = np.empty((n, k_users), dtype=complex)
    for l in range(n):
        for k in range(k_users):
            offset, shift = profile.offset_and_shift(cell, l, k)
            polluted = polluted_pilot(
                book.sequences[l], offset, shift, profile.symbol_duration_s
            )
            kappa[l, k] = polluted @ own
    return kappa
