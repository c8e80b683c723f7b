"""Dense density-matrix ground truth for small systems.

Everything here works with explicit complex matrices and literal
basis-state definitions: maximally entangled pairs are built as state
vectors, gates as permutation or Fourier matrices, measurements as
projector sums.  The coefficient-level shortcuts used elsewhere in the
package are validated against this module, which never imports from
:mod:`quditpure.recurrence`.

Sizes are deliberately tiny: two-pair simulations allow d <= 5 and
three-pair simulations d <= 3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .indices import check_dimension
from .states import CoeffMatrix

__all__ = [
    "DenseState",
    "MAX_THREE_PAIR_D",
    "MAX_TWO_PAIR_D",
    "bell_basis",
    "bell_vector",
    "build_bell_pairs",
    "depolarize_oracle",
    "ghz_basis",
    "ghz_pair_index_map",
    "ghz_vector",
    "outcome_class_probabilities",
    "pauli_matrix",
    "qft_matrix",
    "recurrence_map_deviation",
    "simulate_recurrence_step",
    "verify_bell_index_maps",
    "verify_depolarization_identity",
    "verify_mgxor_index_map",
]

MAX_TWO_PAIR_D = 5
MAX_THREE_PAIR_D = 3

TRACE_TOL = 1e-10
HERM_TOL = 1e-10
PSD_TOL = -1e-9


def _omega(d: int) -> complex:
    return np.exp(2j * math.pi / d)


def bell_vector(d: int, phase: int, amplitude: int) -> np.ndarray:
    """State vector (1/sqrt(d)) sum_r w**(phase*r) |r>|r - amplitude>.

    Qudit order is (A, B); the computational index is a*d + b.
    """
    d = check_dimension(d)
    w = _omega(d)
    v = np.zeros(d * d, dtype=complex)
    for r in range(d):
        v[r * d + (r - amplitude) % d] = w ** (phase * r)
    return v / math.sqrt(d)


def bell_basis(d: int) -> np.ndarray:
    """Unitary whose column phase*d + amplitude is the matching bell_vector."""
    B = np.empty((d * d, d * d), dtype=complex)
    for m in range(d):
        for n in range(d):
            B[:, m * d + n] = bell_vector(d, m, n)
    return B


def ghz_vector(d: int, phase: int, amplitudes: tuple[int, ...]) -> np.ndarray:
    """N-party generalization: (1/sqrt(d)) sum_r w**(phase*r) |r>|r-l_1>...|r-l_{N-1}>."""
    d = check_dimension(d)
    N = len(amplitudes) + 1
    w = _omega(d)
    v = np.zeros(d**N, dtype=complex)
    for r in range(d):
        flat = r
        for l in amplitudes:
            flat = flat * d + (r - l) % d
        v[flat] = w ** (phase * r)
    return v / math.sqrt(d)


def ghz_basis(d: int, N: int) -> np.ndarray:
    """Columns are GHZ vectors in mixed-radix order, phase index slowest."""
    size = d**N
    G = np.empty((size, size), dtype=complex)
    for flat in range(size):
        digits = np.unravel_index(flat, (d,) * N)
        G[:, flat] = ghz_vector(d, digits[0], tuple(digits[1:]))
    return G


def pauli_matrix(d: int, k: int, j: int) -> np.ndarray:
    """Generalized Pauli with phase power k and shift power j.

    Acts as |r> -> w**(k r) |r - j>; (k, j) ranging over [0, d)**2 gives
    the full error basis.
    """
    d = check_dimension(d)
    w = _omega(d)
    M = np.zeros((d, d), dtype=complex)
    for r in range(d):
        M[(r - j) % d, r] = w ** (k * r)
    return M


def qft_matrix(d: int) -> np.ndarray:
    """Fourier matrix Q[n, m] = w**(n m) / sqrt(d)."""
    d = check_dimension(d)
    w = _omega(d)
    idx = np.arange(d)
    return w ** np.outer(idx, idx) / math.sqrt(d)


@dataclass(frozen=True)
class DenseState:
    """Explicit density matrix over ``pairs`` two-qudit copies.

    Qudit order is (A1, B1, A2, B2[, A3, B3]): copy-major, with each
    copy's A qudit before its B qudit.
    """

    d: int
    pairs: int
    rho: np.ndarray

    def check(self) -> "DenseState":
        """Validate trace, Hermiticity and positivity within tolerances."""
        rho = self.rho
        if abs(np.trace(rho).real - 1.0) > TRACE_TOL or abs(np.trace(rho).imag) > TRACE_TOL:
            raise ValueError(f"density matrix trace {np.trace(rho):.12g} is not 1")
        if np.abs(rho - rho.conj().T).max() > HERM_TOL:
            raise ValueError("density matrix is not Hermitian")
        if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() < PSD_TOL:
            raise ValueError("density matrix has a significantly negative eigenvalue")
        return self


def _check_pair_limit(d: int, pairs: int) -> None:
    if pairs == 2:
        limit = MAX_TWO_PAIR_D
    elif pairs == 3:
        limit = MAX_THREE_PAIR_D
    else:
        raise ValueError(f"pair count must be 2 or 3, got {pairs}")
    if d > limit:
        raise ValueError(
            f"dense simulation limited to d <= {limit} for {pairs} pairs, got d={d}"
        )


def bell_diagonal_density(state: CoeffMatrix) -> np.ndarray:
    """Density matrix sum_{m,n} alpha[m, n] |psi_mn><psi_mn|."""
    B = bell_basis(state.d)
    return (B * state.alpha.reshape(-1)) @ B.conj().T


def build_bell_pairs(coeffs: CoeffMatrix, pairs: int) -> DenseState:
    """Tensor product of identical Bell-diagonal copies."""
    d = coeffs.d
    _check_pair_limit(d, pairs)
    rho_pair = bell_diagonal_density(coeffs)
    rho = rho_pair
    for _ in range(pairs - 1):
        rho = np.kron(rho, rho_pair)
    return DenseState(d=d, pairs=pairs, rho=rho).check()


def _gxor_permutation(d: int, pairs: int) -> np.ndarray:
    """Inverse-permutation index array for the bilateral controlled gates.

    Copy 1 controls every other copy on both sides:
    target digits become (control - target) mod d.  Returns ``inv`` such
    that conjugation acts as rho[np.ix_(inv, inv)].
    """
    n = 2 * pairs
    dims = (d,) * n
    size = d**n
    perm = np.empty(size, dtype=np.intp)
    for x in range(size):
        digits = list(np.unravel_index(x, dims))
        a1, b1 = digits[0], digits[1]
        for copy in range(1, pairs):
            digits[2 * copy] = (a1 - digits[2 * copy]) % d
            digits[2 * copy + 1] = (b1 - digits[2 * copy + 1]) % d
        perm[x] = np.ravel_multi_index(digits, dims)
    inv = np.empty_like(perm)
    inv[perm] = np.arange(size)
    return inv


def _apply_permutation(rho: np.ndarray, inv: np.ndarray) -> np.ndarray:
    return rho[np.ix_(inv, inv)]


def _bilateral_qft(d: int, copies: int) -> np.ndarray:
    """kron of (QFT on A, conjugate QFT on B) over the given copies."""
    Q = qft_matrix(d)
    single = np.kron(Q, Q.conj())
    out = single
    for _ in range(copies - 1):
        out = np.kron(out, single)
    return out


def _postselect_even(
    rho: np.ndarray, d: int, pairs: int, classes: tuple[int, ...]
) -> tuple[np.ndarray, float]:
    """Project measured copies onto outcome-difference classes and trace them out.

    ``classes`` gives, per target copy (copies 2..pairs), the required
    value of (A outcome - B outcome) mod d.  Returns the unnormalized
    kept-pair density matrix and its trace (the branch probability).
    """
    n = 2 * pairs
    T = rho.reshape((d,) * (2 * n))
    kept = np.zeros((d, d, d, d), dtype=complex)
    # Sum over all A-side outcomes of the measured copies.
    for outcome in np.ndindex(*((d,) * (pairs - 1))):
        sl = [slice(None)] * (2 * n)
        for copy, (z, c) in enumerate(zip(outcome, classes), start=1):
            zb = (z - c) % d
            sl[2 * copy] = z
            sl[2 * copy + 1] = zb
            sl[n + 2 * copy] = z
            sl[n + 2 * copy + 1] = zb
        kept += T[tuple(sl)]
    sigma = kept.reshape(d * d, d * d)
    prob = float(np.trace(sigma).real)
    return sigma, prob


def _extract_coefficients(sigma: np.ndarray, d: int) -> np.ndarray:
    """Diagonal of sigma in the maximally entangled basis, as a d x d matrix."""
    B = bell_basis(d)
    diag = np.einsum("ij,jk,ki->i", B.conj().T, sigma, B).real
    return diag.reshape(d, d)


def simulate_recurrence_step(
    state: DenseState, variant: str
) -> tuple[CoeffMatrix, float]:
    """Run one purification round as explicit quantum mechanics.

    variant "P1": bilateral controlled-difference gates from copy 1 onto
    the other copies, computational-basis measurement of the target
    copies, postselection on equal outcomes within each copy.
    variant "P2": the same circuit sandwiched between bilateral Fourier
    transforms — the forward transform on every copy going in, and the
    inverse transform on the kept copy coming out.  (The forward
    transform carries a negation of the outgoing amplitude index along
    with the index swap; undoing it with the inverse on the way out is
    what makes the round act as an exact transpose conjugation of the
    two-copy map.)  variant "THREE_COPY": the P1 circuit on three copies.

    Returns the kept copy's weight matrix and the branch probability.
    """
    d, pairs = state.d, state.pairs
    _check_pair_limit(d, pairs)
    if variant in ("P1", "P2") and pairs != 2:
        raise ValueError(f"variant {variant} needs 2 pairs, got {pairs}")
    if variant == "THREE_COPY" and pairs != 3:
        raise ValueError(f"variant THREE_COPY needs 3 pairs, got {pairs}")
    if variant not in ("P1", "P2", "THREE_COPY"):
        raise ValueError(f"unknown variant {variant!r}")

    rho = state.rho
    if variant == "P2":
        BQ = _bilateral_qft(d, pairs)
        rho = BQ @ rho @ BQ.conj().T
    rho = _apply_permutation(rho, _gxor_permutation(d, pairs))
    sigma, prob = _postselect_even(rho, d, pairs, (0,) * (pairs - 1))
    if prob <= 0.0:
        raise ValueError("postselected branch has zero probability")
    if variant == "P2":
        bq1 = _bilateral_qft(d, 1)
        sigma = bq1.conj().T @ sigma @ bq1
    return CoeffMatrix(_extract_coefficients(sigma, d) / prob), prob


def outcome_class_probabilities(state: DenseState, variant: str) -> np.ndarray:
    """Branch probabilities over all outcome-difference classes.

    Shape (d,) for two-pair variants, (d, d) for the three-copy one; the
    entries sum to 1.
    """
    d, pairs = state.d, state.pairs
    rho = state.rho
    if variant == "P2":
        BQ = _bilateral_qft(d, pairs)
        rho = BQ @ rho @ BQ.conj().T
    rho = _apply_permutation(rho, _gxor_permutation(d, pairs))
    shape = (d,) * (pairs - 1)
    probs = np.empty(shape)
    for classes in np.ndindex(*shape):
        probs[classes] = _postselect_even(rho, d, pairs, classes)[1]
    return probs


def depolarize_oracle(state: CoeffMatrix, retention: float) -> CoeffMatrix:
    """One-sided uniform Pauli noise as an explicit Kraus sum.

    Applies sum over the d**2 Pauli branches on qudit B of a single pair
    and re-extracts the diagonal weights.  Matches the coefficient-level
    :func:`quditpure.states.depolarize_channel` exactly.
    """
    if not 0.0 <= retention <= 1.0:
        raise ValueError(f"retention must be in [0, 1], got {retention}")
    d = state.d
    rho = bell_diagonal_density(state)
    eye = np.eye(d)
    acc = np.zeros_like(rho)
    for k in range(d):
        for j in range(d):
            kraus = np.kron(eye, pauli_matrix(d, k, j))
            acc += kraus @ rho @ kraus.conj().T
    mixed = retention * rho + (1.0 - retention) / (d * d) * acc
    return CoeffMatrix(_extract_coefficients(mixed, d))


def verify_depolarization_identity(d: int, trials: int = 5, seed: int = 0) -> float:
    """Check that the correlated-Pauli twirl removes all coherences.

    Draws random two-qudit density matrices, averages the conjugation by
    (Pauli on A) tensor (conjugate Pauli on B) over all d**2 Pauli
    labels, and transforms to the maximally entangled basis.  Raises if
    any diagonal entry moved by more than 1e-10; returns the largest
    off-diagonal magnitude after the twirl (should be ~0).
    """
    d = check_dimension(d)
    if d > MAX_TWO_PAIR_D:
        raise ValueError(f"dense twirl check limited to d <= {MAX_TWO_PAIR_D}")
    rng = np.random.default_rng(seed)
    B = bell_basis(d)
    size = d * d
    worst_off = 0.0
    for _ in range(int(trials)):
        G = rng.normal(size=(size, size)) + 1j * rng.normal(size=(size, size))
        rho = G @ G.conj().T
        rho /= np.trace(rho).real
        before = np.einsum("ij,jk,ki->i", B.conj().T, rho, B).real
        acc = np.zeros_like(rho)
        for mu in range(d):
            for nu in range(d):
                g = np.kron(pauli_matrix(d, mu, nu), pauli_matrix(d, mu, nu).conj())
                acc += g @ rho @ g.conj().T
        acc /= d * d
        C = B.conj().T @ acc @ B
        after = np.diag(C).real
        if np.abs(after - before).max() > 1e-10:
            raise ValueError("twirl moved a diagonal weight; conventions are broken")
        off = np.abs(C - np.diag(np.diag(C))).max()
        worst_off = max(worst_off, float(off))
    return worst_off


def ghz_pair_index_map(
    control: tuple[int, tuple[int, ...]],
    target: tuple[int, tuple[int, ...]],
    d: int,
) -> tuple[tuple[int, tuple[int, ...]], tuple[int, tuple[int, ...]]]:
    """Label action of the amplitude-accumulating trilateral gate.

    (m, ls), (k, is) -> (m + k, ls), (-k, ls + is)   componentwise mod d.

    The plain trilateral controlled-difference gate produces amplitude
    differences instead of sums; flipping the sign of the incoming target
    amplitudes (a basis permutation on the target copy) turns the
    differences into the sums above.
    """
    d = check_dimension(d)
    m, c_amps = control
    k, t_amps = target
    if len(c_amps) != len(t_amps):
        raise ValueError("control and target must have the same party count")
    new_control = ((m + k) % d, tuple(int(a) % d for a in c_amps))
    new_target = (
        (-k) % d,
        tuple((int(a) + int(b)) % d for a, b in zip(c_amps, t_amps)),
    )
    return new_control, new_target


def verify_mgxor_index_map(d: int, atol: float = 1e-10) -> bool:
    """Exhaustively validate :func:`ghz_pair_index_map` for three parties.

    Builds the modified gate as (trilateral controlled-difference) after
    (amplitude-sign flip on the target copy), applies it to every pair of
    three-party GHZ basis states, and compares against the predicted
    labels by projector overlap (global phases discarded).  The sign flip
    must act only on the incoming side: flipping on both sides of the
    gate would negate the outgoing amplitude sums as well, which is not
    the accumulation behaviour the map promises.
    """
    d = check_dimension(d)
    if d > MAX_THREE_PAIR_D:
        raise ValueError(f"GHZ gate check limited to d <= {MAX_THREE_PAIR_D}")
    N = 3
    size = d**N
    G = ghz_basis(d, N)

    # Amplitude-sign flip on one copy, as a GHZ-basis permutation.
    W = np.zeros((size, size), dtype=complex)
    dims = (d,) * N
    for flat in range(size):
        digits = np.unravel_index(flat, dims)
        flipped = (digits[0],) + tuple((-a) % d for a in digits[1:])
        W[:, flat] = G[:, np.ravel_multi_index(flipped, dims)]
    W = W @ G.conj().T

    # Trilateral controlled-difference permutation on 2N qudits
    # (copy-major order: A1, B1, C1, A2, B2, C2).
    reg_dims = (d,) * (2 * N)
    reg_size = d ** (2 * N)
    perm = np.empty(reg_size, dtype=np.intp)
    for x in range(reg_size):
        digits = list(np.unravel_index(x, reg_dims))
        for party in range(N):
            digits[N + party] = (digits[party] - digits[N + party]) % d
        perm[x] = np.ravel_multi_index(digits, reg_dims)

    for c_flat in range(size):
        c_digits = np.unravel_index(c_flat, dims)
        control = (int(c_digits[0]), tuple(int(a) for a in c_digits[1:]))
        for t_flat in range(size):
            t_digits = np.unravel_index(t_flat, dims)
            target = (int(t_digits[0]), tuple(int(a) for a in t_digits[1:]))
            vin = np.kron(G[:, c_flat], W @ G[:, t_flat])
            vout = np.empty_like(vin)
            vout[perm] = vin
            (mc, ac), (mt, at) = ghz_pair_index_map(control, target, d)
            expected = np.kron(
                ghz_vector(d, mc, ac), ghz_vector(d, mt, at)
            )
            overlap = abs(np.vdot(expected, vout))
            if abs(overlap - 1.0) > atol:
                return False
    return True


def verify_bell_index_maps(d: int) -> dict[str, float]:
    """Max projector deviation of the label maps from unitary conjugation.

    Checks the bilateral controlled-difference gate, the bilateral
    Fourier transform, and one-sided Pauli errors on every basis state
    (pair) for the given dimension.  Values should be ~1e-15.

    The Fourier check targets the map the local unitary actually
    realizes: (phase, amplitude) -> (amplitude, -phase).  A bare index
    swap is impossible for any local gate once d > 2 — local relabelings
    of this basis act as determinant-one maps on the index pair, while a
    bare swap has determinant minus one — so the exact action carries a
    negation of the outgoing amplitude index.  ``bqft_index_map`` keeps
    the plain swap: the negation cancels over a full phase-purifying
    round (forward transform in, inverse transform out) and no protocol
    quantity distinguishes a weight matrix from its index-negated twin.
    For d = 2 the two maps coincide.
    """
    from .indices import bgxor_index_map, bqft_index_map, pauli_on_bell

    d = check_dimension(d)
    if d > MAX_TWO_PAIR_D:
        raise ValueError(f"dense index-map check limited to d <= {MAX_TWO_PAIR_D}")
    devs = {"bgxor": 0.0, "bqft": 0.0, "pauli": 0.0}

    inv = _gxor_permutation(d, 2)
    perm = np.empty_like(inv)
    perm[inv] = np.arange(inv.size)
    for k1 in range(d):
        for j1 in range(d):
            vc = bell_vector(d, k1, j1)
            for k2 in range(d):
                for j2 in range(d):
                    vin = np.kron(vc, bell_vector(d, k2, j2))
                    vout = np.empty_like(vin)
                    vout[perm] = vin
                    (kc, jc), (kt, jt) = bgxor_index_map((k1, j1), (k2, j2), d)
                    expected = np.kron(bell_vector(d, kc, jc), bell_vector(d, kt, jt))
                    devs["bgxor"] = max(
                        devs["bgxor"], abs(abs(np.vdot(expected, vout)) - 1.0)
                    )

    BQ = _bilateral_qft(d, 1)
    for m in range(d):
        for n in range(d):
            vout = BQ @ bell_vector(d, m, n)
            swapped = bqft_index_map((m, n))
            expected = bell_vector(d, swapped[0], (-swapped[1]) % d)
            devs["bqft"] = max(devs["bqft"], abs(abs(np.vdot(expected, vout)) - 1.0))

    eye = np.eye(d)
    for a in range(d):
        for b in range(d):
            U = np.kron(eye, pauli_matrix(d, a, b))
            for m in range(d):
                for n in range(d):
                    vout = U @ bell_vector(d, m, n)
                    expected = bell_vector(d, *pauli_on_bell(a, b, (m, n), d))
                    devs["pauli"] = max(
                        devs["pauli"], abs(abs(np.vdot(expected, vout)) - 1.0)
                    )
    return devs


def recurrence_map_deviation(
    d: int, variant: str, trials: int = 20, seed: int = 12345
) -> tuple[float, float]:
    """Compare a coefficient-level map against the dense simulation.

    Runs ``trials`` random Bell-diagonal states through both routes and
    returns (largest weight deviation, largest probability deviation).
    """
    from .recurrence import p1_map, p2_map, three_copy_map
    from .states import random_state

    maps = {"P1": (p1_map, 2), "P2": (p2_map, 2), "THREE_COPY": (three_copy_map, 3)}
    if variant not in maps:
        raise ValueError(f"unknown variant {variant!r}")
    fast_map, pairs = maps[variant]
    _check_pair_limit(d, pairs)
    rng = np.random.default_rng(seed)
    worst_state = 0.0
    worst_prob = 0.0
    for _ in range(int(trials)):
        state = random_state(d, rng)
        dense = build_bell_pairs(state, pairs)
        ref_state, ref_prob = simulate_recurrence_step(dense, variant)
        fast_state, fast_prob = fast_map(state)
        worst_state = max(
            worst_state, float(np.abs(ref_state.alpha - fast_state.alpha).max())
        )
        worst_prob = max(worst_prob, abs(ref_prob - fast_prob))
    return worst_state, worst_prob
