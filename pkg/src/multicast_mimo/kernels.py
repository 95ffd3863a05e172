"""Hot numeric kernels for the finite-antenna Monte Carlo engine.

Two implementations of the per-draw math exist side by side: a pure-numpy
path (einsum + BLAS) and numba ``@njit`` loops.  The active one is chosen by
the ``MULTICAST_MIMO_BACKEND`` environment variable (``numpy`` or ``numba``);
unset, numba is used when importable.  Both compute the same quantities; they
may differ at machine precision because summation order differs.

``benchmarks/kernel_bench.py`` times the two paths against each other.
"""

import os
from types import SimpleNamespace

import numpy as np

BACKEND_ENV_VAR = "MULTICAST_MIMO_BACKEND"

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is an install-time dependency
    HAS_NUMBA = False


def combine_and_normalize_numpy(h, weights, noise):
    """Unit-norm beam per cell from weighted channel sums plus a noise vector.

    h: (N, N, K, M) small-scale tensor; weights: (N, N, K) complex combining
    coefficients with the large-scale amplitudes folded in; noise: (N, M) or
    None.  Row j of the result is the normalized estimate/beam of BS j.
    """
    w = np.einsum("jlk,jlkm->jm", weights, h)
    if noise is not None:
        w = w + noise
    return w / np.linalg.norm(w, axis=1, keepdims=True)


def downlink_sinr_numpy(h_eval, amp, w, powers, sigma2, eval_cell):
    """Per-user downlink SINR in the evaluated cell.

    h_eval: (N, K, M) small-scale vectors from every BS to the evaluated
    cell's users; amp: (N, K) large-scale amplitudes sqrt(beta); w: (N, M)
    unit beams; powers: (N,) per-BS transmit powers.  Returns (K,) linear
    SINRs: serving-cell beam power over other-cell beam power plus noise.
    """
    dots = np.einsum("jkm,jm->jk", h_eval.conj(), w) * amp
    received = powers[:, None] * np.abs(dots) ** 2  # (N, K)
    signal = received[eval_cell]
    interference = received.sum(axis=0) - signal
    return signal / (interference + sigma2)


if HAS_NUMBA:

    @njit(cache=True)
    def combine_and_normalize_numba(h, weights, noise):  # pragma: no cover - jit
        n, n2, k_users, m = h.shape
        out = np.zeros((n, m), dtype=np.complex128)
        for j in range(n):
            for l in range(n2):
                for k in range(k_users):
                    c = weights[j, l, k]
                    if c != 0:
                        for t in range(m):
                            out[j, t] += c * h[j, l, k, t]
            norm_sq = 0.0
            for t in range(m):
                out[j, t] += noise[j, t]
                norm_sq += out[j, t].real ** 2 + out[j, t].imag ** 2
            inv = 1.0 / np.sqrt(norm_sq)
            for t in range(m):
                out[j, t] *= inv
        return out

    @njit(cache=True)
    def downlink_sinr_numba(h_eval, amp, w, powers, sigma2, eval_cell):  # pragma: no cover - jit
        n, k_users, m = h_eval.shape
        sinr = np.empty(k_users)
        for k in range(k_users):
            signal = 0.0
            total = sigma2
            for j in range(n):
                acc = 0.0 + 0.0j
                for t in range(m):
                    acc += np.conj(h_eval[j, k, t]) * w[j, t]
                rx = powers[j] * (amp[j, k] ** 2) * (acc.real**2 + acc.imag**2)
                if j == eval_cell:
                    signal = rx
                else:
                    total += rx
            sinr[k] = signal / total
        return sinr


_ZERO_NOISE_CACHE: dict[tuple[int, int], np.ndarray] = {}


def _zero_noise(n, m):
    key = (n, m)
    if key not in _ZERO_NOISE_CACHE:
        _ZERO_NOISE_CACHE[key] = np.zeros((n, m), dtype=np.complex128)
    return _ZERO_NOISE_CACHE[key]


def _combine_numba_dispatch(h, weights, noise):
    if noise is None:
        noise = _zero_noise(h.shape[0], h.shape[3])
    return combine_and_normalize_numba(
        np.ascontiguousarray(h),
        np.ascontiguousarray(weights),
        np.ascontiguousarray(noise),
    )


def _downlink_numba_dispatch(h_eval, amp, w, powers, sigma2, eval_cell):
    return downlink_sinr_numba(
        np.ascontiguousarray(h_eval),
        np.ascontiguousarray(amp),
        np.ascontiguousarray(w),
        np.ascontiguousarray(powers),
        float(sigma2),
        int(eval_cell),
    )


def available_backends() -> tuple[str, ...]:
    return ("numpy", "numba") if HAS_NUMBA else ("numpy",)


def active_backend() -> str:
    """Backend selected by the environment, defaulting to numba if present."""
    choice = os.environ.get(BACKEND_ENV_VAR, "").strip().lower()
    if not choice:
        return "numba" if HAS_NUMBA else "numpy"
    if choice not in ("numpy", "numba"):
        raise ValueError(
            f"{BACKEND_ENV_VAR} must be 'numpy' or 'numba', got {choice!r}"
        )
    if choice == "numba" and not HAS_NUMBA:
        raise RuntimeError(f"{BACKEND_ENV_VAR}=numba but numba is not importable")
    return choice


def get_kernels(backend: str | None = None) -> SimpleNamespace:
    """Kernel pair for the requested backend (default: ``active_backend()``)."""
    name = backend or active_backend()
    if name == "numpy":
        return SimpleNamespace(
            name="numpy",
            combine=combine_and_normalize_numpy,
            downlink=downlink_sinr_numpy,
        )
    if name == "numba":
        if not HAS_NUMBA:
            raise RuntimeError("numba backend requested but numba is not importable")
        return SimpleNamespace(
            name="numba",
            combine=_combine_numba_dispatch,
            downlink=_downlink_numba_dispatch,
        )
    raise ValueError(f"unknown backend {name!r}")
