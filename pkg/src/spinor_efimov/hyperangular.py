"""Fixed-hyperradius channel problem and its root structure.

The zero-range reduction of the hyperangular equation turns each fixed R
into a transcendental matrix condition det M(s; R) = 0 over the six
(eigenchannel, spectator) states,

    M = diag[ s cos(s pi/2) - sqrt(2) (R/a_i) sin(s pi/2) ]
        - (4/sqrt(3)) sin(s pi/6) * O,

with the R/a term dropped for unitary channels and closed channels
eliminated outright.  On the imaginary axis s = i kappa the matrix is
i * H(kappa) with H real symmetric, so all roots sit on the real or the
imaginary axis and are found by tracking the sorted eigenvalue curves of
H for sign changes.  Tracking curves rather than det signs is what
resolves even-multiplicity roots (the theta = 0 anchor is a double root
at which the determinant does not change sign).

Root finding internally evaluates an overflow-safe congruent form
2 exp(-kappa pi/2) D H D (D a positive diagonal); by Sylvester's law this
moves no root, changes no multiplicity, and maps null spaces through D.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .spin import (
    PAIR_LABELS,
    ChannelLength,
    ExchangeOverlap,
    ThreeBodySpinBasis,
    TwoBodyChannelSet,
    as_length,
    channels_from_angle,
    exchange_overlap,
    three_body_basis,
)

KERNEL_COEFF = 4.0 / math.sqrt(3.0)
SQRT2 = math.sqrt(2.0)

#: residual bound on the tracked (normalized) eigenvalue curves at a root
RESIDUAL_TOL = 1e-9
#: two refined roots on distinct curves closer than this merge into one
MERGE_TOL = 1e-8
#: lower edge of the scan grid; s = 0 is a removable parametrization point
GRID_EPS = 1e-8
#: default number of scan-grid points
N_GRID = 2000


class HyperangularError(ValueError):
    pass


class GridResolutionWarning(UserWarning):
    """A curve came close to zero without a detectable sign change; a pair
    of roots inside one grid cell cannot be excluded."""


@dataclass(frozen=True)
class ChannelMatrixSpec:
    """Everything the channel matrix needs at one hyperradius.

    lengths holds one ChannelLength per channel; state_channel maps each
    basis state to its channel (two spectator states per channel in the
    full problem, one state total in the collapsed single-level problem).
    In asymptotic mode every channel is unitary or closed and R never
    enters; in finite mode every channel is finite or closed and R > 0.
    """

    lengths: tuple[ChannelLength, ...]
    overlap: np.ndarray
    state_channel: tuple[int, ...]
    mode: str
    hyperradius: float | None = None
    channel_set: TwoBodyChannelSet | None = field(default=None, repr=False)

    def __post_init__(self):
        o = np.asarray(self.overlap, dtype=float)
        n = len(self.state_channel)
        if o.shape != (n, n):
            raise HyperangularError(
                f"overlap shape {o.shape} does not match {n} states")
        if np.max(np.abs(o - o.T)) > 1e-12:
            raise HyperangularError("overlap matrix must be symmetric")
        object.__setattr__(self, "overlap", 0.5 * (o + o.T))
        if self.mode not in ("asymptotic", "finite"):
            raise HyperangularError(f"unknown mode {self.mode!r}")
        if self.mode == "asymptotic":
            bad = [l for l in self.lengths if l.kind == "finite"]
            if bad:
                raise HyperangularError(
                    "asymptotic mode takes only unitary or closed channels; "
                    f"got finite length(s) {[l.value for l in bad]}")
        else:
            bad = [l for l in self.lengths if l.kind == "unitary"]
            if bad:
                raise HyperangularError(
                    "finite mode takes only finite or closed channels; "
                    "use asymptotic mode for unitary flags")
            if self.hyperradius is None or not self.hyperradius > 0.0:
                raise HyperangularError("finite mode requires hyperradius > 0")

    @staticmethod
    def from_channels(channels: TwoBodyChannelSet,
                      overlap: ExchangeOverlap | np.ndarray,
                      mode: str,
                      hyperradius: float | None = None) -> "ChannelMatrixSpec":
        o = overlap.matrix if isinstance(overlap, ExchangeOverlap) else overlap
        return ChannelMatrixSpec(
            lengths=tuple(channels.lengths),
            overlap=np.asarray(o, dtype=float),
            state_channel=(0, 0, 1, 1, 2, 2),
            mode=mode,
            hyperradius=hyperradius,
            channel_set=channels,
        )

    @staticmethod
    def single_level(a, mode: str,
                     hyperradius: float | None = None) -> "ChannelMatrixSpec":
        """Collapsed identical-boson problem: one channel, one spectator
        state, exchange overlap exactly 2."""
        return ChannelMatrixSpec(
            lengths=(as_length(a),),
            overlap=np.array([[2.0]]),
            state_channel=(0,),
            mode=mode,
            hyperradius=hyperradius,
        )

    @property
    def n_states(self) -> int:
        return len(self.state_channel)

    def active_states(self) -> np.ndarray:
        """Indices of states whose channel is not closed."""
        return np.array([j for j, ch in enumerate(self.state_channel)
                         if self.lengths[ch].kind != "closed"], dtype=int)

    def _inverse_scaled_radius(self) -> np.ndarray:
        """R/a per active state (0 for unitary channels)."""
        out = []
        for j in self.active_states():
            l = self.lengths[self.state_channel[j]]
            if l.kind == "unitary":
                out.append(0.0)
            else:
                out.append(self.hyperradius / l.value)
        return np.array(out)

    def _norm_weights(self) -> np.ndarray:
        """Per-state congruence weights, max(1, sqrt(2)|R/a|)."""
        return np.maximum(1.0, SQRT2 * np.abs(self._inverse_scaled_radius()))


def _active_overlap(spec: ChannelMatrixSpec) -> np.ndarray:
    act = spec.active_states()
    return spec.overlap[np.ix_(act, act)]


def _imag_matrices(spec: ChannelMatrixSpec, kappas: np.ndarray,
                   normalized: bool) -> np.ndarray:
    """Stack of H(kappa) (or its normalized congruent form) over a batch
    of kappa values; shape (len(kappas), n_active, n_active)."""
    kappas = np.atleast_1d(np.asarray(kappas, dtype=float))
    r_over_a = spec._inverse_scaled_radius()
    o = _active_overlap(spec)
    m = o.shape[0]
    if normalized:
        e_full = np.exp(-math.pi * kappas)
        diag = (kappas * (1.0 + e_full))[:, None] \
            - SQRT2 * np.outer(1.0 - e_full, r_over_a)
        kern = KERNEL_COEFF * (np.exp(-math.pi * kappas / 3.0)
                               - np.exp(-2.0 * math.pi * kappas / 3.0))
        d = 1.0 / np.sqrt(spec._norm_weights())
        scale = np.outer(d, d)
    else:
        diag = (kappas * np.cosh(0.5 * math.pi * kappas))[:, None] \
            - SQRT2 * np.outer(np.sinh(0.5 * math.pi * kappas), r_over_a)
        kern = KERNEL_COEFF * np.sinh(math.pi * kappas / 6.0)
        scale = None
    out = -kern[:, None, None] * o[None, :, :]
    idx = np.arange(m)
    out[:, idx, idx] += diag
    if scale is not None:
        out *= scale[None, :, :]
    return out


def _real_matrices(spec: ChannelMatrixSpec, svals: np.ndarray,
                   normalized: bool) -> np.ndarray:
    """Stack of M(s) on the real axis (already real symmetric)."""
    svals = np.atleast_1d(np.asarray(svals, dtype=float))
    r_over_a = spec._inverse_scaled_radius()
    o = _active_overlap(spec)
    m = o.shape[0]
    diag = (svals * np.cos(0.5 * math.pi * svals))[:, None] \
        - SQRT2 * np.outer(np.sin(0.5 * math.pi * svals), r_over_a)
    kern = KERNEL_COEFF * np.sin(math.pi * svals / 6.0)
    out = -kern[:, None, None] * o[None, :, :]
    idx = np.arange(m)
    out[:, idx, idx] += diag
    if normalized:
        d = 1.0 / np.sqrt(spec._norm_weights())
        out *= np.outer(d, d)[None, :, :]
    return out


def channel_matrix(s, spec: ChannelMatrixSpec,
                   normalized: bool = False) -> np.ndarray:
    """Evaluate the channel matrix at one point of the real or imaginary
    axis, reduced to the active (non-closed) states.

    For real s the matrix M(s) itself is returned; for s = i kappa the
    real symmetric H(kappa) with M = i H is returned.  normalized=True
    applies the overflow-safe congruence used by the root finders.
    """
    s = complex(s)
    if s == 0:
        raise HyperangularError("s = 0 is a removable parametrization point")
    if s.real != 0.0 and s.imag != 0.0:
        raise HyperangularError(
            f"s must lie on the real or imaginary axis, got {s!r}")
    if spec.active_states().size == 0:
        raise HyperangularError("all channels are closed; no matrix remains")
    if s.real != 0.0:
        return _real_matrices(spec, np.array([s.real]), normalized)[0]
    kappa = s.imag
    if kappa <= 0.0:
        raise HyperangularError(f"imaginary axis requires kappa > 0, got {kappa}")
    return _imag_matrices(spec, np.array([kappa]), normalized)[0]


# ---------------------------------------------------------------------------
# spin profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpinProfile:
    """Weights of a root's null space over the six (pair basis state,
    spectator level) configurations; rows follow PAIR_LABELS, columns are
    spectator level 1 and 2.  Weights sum to one."""

    weights: np.ndarray  # (3, 2)

    @property
    def same_level_weight(self) -> float:
        """Total weight on the all-atoms-in-one-level family (|111>, |222>)."""
        return float(self.weights[0, 0] + self.weights[2, 1])

    @property
    def mixed_weight(self) -> float:
        return float(np.sum(self.weights) - self.same_level_weight)

    def as_dict(self) -> dict[str, float]:
        out = {}
        for i, lab in enumerate(PAIR_LABELS):
            for m in (1, 2):
                out[f"{lab}*{m}"] = float(self.weights[i, m - 1])
        return out


@dataclass(frozen=True)
class ChannelRoot:
    """One root s_nu of the channel problem.

    value is kappa = |s| for imaginary-axis roots and s for real-axis
    ones.  null_vectors holds an orthonormal basis of the null space as
    columns over the full state list (exact zeros on closed channels);
    residual is the largest tracked-eigenvalue magnitude left at the root.
    """

    axis: str  # "imaginary" | "real"
    value: float
    multiplicity: int
    null_vectors: np.ndarray
    residual: float
    spin_profile: SpinProfile | None = None

    @property
    def s_squared(self) -> float:
        return -self.value ** 2 if self.axis == "imaginary" else self.value ** 2


def classify_root(root: ChannelRoot, basis: ThreeBodySpinBasis) -> SpinProfile:
    """Project a root's null vectors onto the fixed (pair basis state,
    spectator) configurations and average the squared amplitudes.

    The channel-to-pair-basis rotation is orthogonal, so the weights of
    each null vector sum to one exactly; averaging over a degenerate null
    space keeps the profile invariant under basis rotations inside it.
    """
    if root.null_vectors.shape[0] != 6:
        raise HyperangularError(
            "spin classification needs the six-state channel problem")
    v = basis.channels.vectors
    weights = np.zeros((3, 2))
    mult = root.null_vectors.shape[1]
    for k in range(mult):
        coeff = root.null_vectors[:, k].reshape(3, 2)  # (channel, spectator)
        weights += (v @ coeff) ** 2
    weights /= mult
    total = float(np.sum(weights))
    if abs(total - 1.0) > 1e-10:
        raise HyperangularError(
            f"spin profile weights sum to {total!r}, expected 1")
    return SpinProfile(weights)


# ---------------------------------------------------------------------------
# root finding by eigenvalue-curve tracking
# ---------------------------------------------------------------------------

def default_kappa_max(spec: ChannelMatrixSpec) -> float:
    """10 covers every attachment-region root; finite channels extend the
    window to catch dimer-limit roots near sqrt(2) R/a."""
    finite = [abs(l.value) for l in spec.lengths if l.kind == "finite"]
    if not finite:
        return 10.0
    return 10.0 + 2.0 * SQRT2 * spec.hyperradius / min(finite)


def _bisect_curve(eval_one, k: int, lo: float, hi: float, f_lo: float,
                  f_hi: float, tol: float) -> float:
    """Bisect the k-th sorted eigenvalue curve to a sign flip."""
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break  # interval at floating resolution
        f_mid = eval_one(mid)[k]
        if f_mid == 0.0:
            return mid
        if (f_lo < 0.0) != (f_mid < 0.0):
            hi, f_hi = mid, f_mid
        else:
            lo, f_lo = mid, f_mid
    return 0.5 * (lo + hi)


def _refine_tol(x: float) -> float:
    return max(1e-12, 4.0 * np.finfo(float).eps * abs(x))


def _find_axis_roots(spec: ChannelMatrixSpec, grid: np.ndarray,
                     build_batch, axis: str,
                     merge_tol: float,
                     warning_sink: list | None) -> list[ChannelRoot]:
    act = spec.active_states()
    if act.size == 0:
        return []

    lam = np.linalg.eigvalsh(build_batch(grid))  # (n_grid, n_active)
    n_curves = lam.shape[1]

    def eval_one(x: float) -> np.ndarray:
        return np.linalg.eigvalsh(build_batch(np.array([x]))[0])

    refined: list[float] = []
    for k in range(n_curves):
        col = lam[:, k]
        neg = col < 0.0
        hits = np.nonzero(neg[:-1] != neg[1:])[0]
        for i in hits:
            refined.append(_bisect_curve(
                eval_one, k, grid[i], grid[i + 1], col[i], col[i + 1],
                _refine_tol(grid[i + 1])))
        _flag_tangencies(grid, col, k, eval_one, refined, warning_sink)

    if not refined:
        return []

    # merge coincident roots on distinct curves into one multiple root
    refined.sort()
    groups: list[list[float]] = [[refined[0]]]
    for x in refined[1:]:
        if x - groups[-1][-1] <= merge_tol:
            groups[-1].append(x)
        else:
            groups.append([x])

    roots = []
    for grp in groups:
        value = float(np.mean(grp))
        mult = len(grp)
        lam_r, vec_r = np.linalg.eigh(build_batch(np.array([value]))[0])
        order = np.argsort(np.abs(lam_r))[:mult]
        residual = float(np.max(np.abs(lam_r[order])))
        if residual > 1e-6:
            raise HyperangularError(
                f"root candidate at {axis} {value} has residual {residual:.3e}")
        # undo the congruence, then re-orthonormalize the null basis
        d = 1.0 / np.sqrt(spec._norm_weights())
        raw = d[:, None] * vec_r[:, order]
        q, _ = np.linalg.qr(raw)
        for c in range(q.shape[1]):
            j = int(np.argmax(np.abs(q[:, c])))
            if q[j, c] < 0:
                q[:, c] = -q[:, c]
        full = np.zeros((spec.n_states, mult))
        full[act, :] = q
        roots.append(ChannelRoot(axis, value, mult, full, residual))
    return roots


def _flag_tangencies(grid, col, k, eval_one, refined, warning_sink) -> None:
    """Look for interior near-zero dips without a sign change; subdivide
    the suspect cells and either pick up the hidden root pair or warn."""
    absc = np.abs(col)
    for i in range(1, len(col) - 1):
        if not (absc[i] <= absc[i - 1] and absc[i] <= absc[i + 1]):
            continue
        if (col[i - 1] < 0) != (col[i] < 0) or (col[i] < 0) != (col[i + 1] < 0):
            continue  # already a detected crossing
        local = max(abs(col[i] - col[i - 1]), abs(col[i + 1] - col[i]))
        if absc[i] > local:
            continue
        fine = np.linspace(grid[i - 1], grid[i + 1], 65)
        fv = np.array([eval_one(x)[k] for x in fine])
        neg = fv < 0.0
        hits = np.nonzero(neg[:-1] != neg[1:])[0]
        if hits.size:
            for j in hits:
                refined.append(_bisect_curve(
                    eval_one, k, fine[j], fine[j + 1], fv[j], fv[j + 1],
                    _refine_tol(fine[j + 1])))
        else:
            fine_var = np.max(np.abs(np.diff(fv)))
            if np.min(np.abs(fv)) < 0.25 * fine_var:
                message = (
                    f"eigenvalue curve {k} grazes zero near "
                    f"{0.5 * (grid[i - 1] + grid[i + 1]):.6g} without a sign "
                    "change; a root pair inside one grid cell cannot be "
                    "excluded, consider a denser grid")
                if warning_sink is not None:
                    warning_sink.append(message)
                else:
                    warnings.warn(message, GridResolutionWarning, stacklevel=3)


def _attach_profiles(spec: ChannelMatrixSpec,
                     roots: list[ChannelRoot]) -> list[ChannelRoot]:
    if spec.channel_set is None or spec.n_states != 6:
        return roots
    basis = three_body_basis(spec.channel_set)
    return [
        ChannelRoot(r.axis, r.value, r.multiplicity, r.null_vectors,
                    r.residual, classify_root(r, basis))
        for r in roots
    ]


def find_roots_imaginary(spec: ChannelMatrixSpec,
                         kappa_max: float | None = None,
                         n_grid: int = N_GRID,
                         merge_tol: float = MERGE_TOL,
                         warning_sink: list | None = None) -> list[ChannelRoot]:
    """All imaginary-axis roots s = i kappa with kappa in (0, kappa_max],
    sorted by descending kappa (the most attractive channel first)."""
    if kappa_max is None:
        kappa_max = default_kappa_max(spec)
    if kappa_max <= GRID_EPS:
        raise HyperangularError(
            f"kappa_max must exceed the grid offset {GRID_EPS:g}")
    if spec.active_states().size == 0:
        return []
    grid = np.linspace(GRID_EPS, kappa_max, n_grid)
    roots = _find_axis_roots(
        spec, grid, lambda xs: _imag_matrices(spec, xs, True), "imaginary",
        merge_tol, warning_sink)
    roots.sort(key=lambda r: -r.value)
    return _attach_profiles(spec, roots)


def _nudge_even_integers(grid: np.ndarray, offset: float = 1e-6) -> np.ndarray:
    """Move grid points off even integers, where sin(s pi/2) = 0 makes the
    diagonal entries of every channel coincide (a benign degeneracy that
    confuses sorted-curve bookkeeping)."""
    grid = grid.copy()
    nearest = 2.0 * np.round(grid / 2.0)
    close = (np.abs(grid - nearest) < offset) & (nearest > 0.0)
    shift = np.where(grid >= nearest, offset, -offset)
    grid[close] = nearest[close] + shift[close]
    return grid


def find_roots_real(spec: ChannelMatrixSpec,
                    s_max: float,
                    n_grid: int = N_GRID,
                    merge_tol: float = MERGE_TOL,
                    warning_sink: list | None = None) -> list[ChannelRoot]:
    """Real-axis roots in (0, s_max], sorted ascending."""
    if not s_max >= 2.0:
        raise HyperangularError("s_max must be at least 2")
    if spec.active_states().size == 0:
        return []
    grid = _nudge_even_integers(np.linspace(GRID_EPS, s_max, n_grid))
    roots = _find_axis_roots(
        spec, grid, lambda xs: _real_matrices(spec, xs, True), "real",
        merge_tol, warning_sink)
    roots.sort(key=lambda r: r.value)
    return _attach_profiles(spec, roots)


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    """Roots at one (theta, R) point.  curve_ids aligns with the roots
    expanded by multiplicity (a double root occupies two curve slots)."""

    theta: float
    hyperradius: float | None
    mode: str
    roots: tuple[ChannelRoot, ...]
    curve_ids: tuple[int, ...]

    def expanded(self) -> list[tuple[int, ChannelRoot]]:
        out = []
        pos = 0
        for r in self.roots:
            for _ in range(r.multiplicity):
                out.append((self.curve_ids[pos], r))
                pos += 1
        return out


@dataclass
class SweepTable:
    """Rows of a theta or radius sweep plus window metadata."""

    kind: str  # "theta" | "radius"
    rows: list[SweepRow]
    window: dict
    warnings: list[str]

    def curve_series(self, axis: str = "imaginary") -> dict[int, list[tuple]]:
        """curve id -> [(theta, R, value), ...] in row order."""
        series: dict[int, list[tuple]] = {}
        for row in self.rows:
            for cid, root in row.expanded():
                if root.axis != axis:
                    continue
                series.setdefault(cid, []).append(
                    (row.theta, row.hyperradius, root.value))
        return series


def _sorted_row_roots(im_roots, re_roots):
    return tuple(sorted(im_roots, key=lambda r: -r.value)) + \
        tuple(sorted(re_roots, key=lambda r: r.value))


class _CurveMatcher:
    """Continuity labeling: each root slot inherits the id of the nearest
    slot from the previous sweep point, new slots open new curves.  The
    match window grows with the value so that fast dimer-limit roots
    (kappa ~ sqrt(2) R/a, moving multiplicatively on a log R grid) stay on
    one curve."""

    def __init__(self, jump_tol: float = 0.3, rel_tol: float = 0.35):
        self.jump_tol = jump_tol
        self.rel_tol = rel_tol
        self.next_id = 0
        self.last: dict[str, list[tuple[int, float]]] = {}

    def assign(self, axis: str, values: list[float]) -> list[int]:
        prev = self.last.get(axis, [])
        taken = set()
        ids: list[int] = []
        for v in values:
            best = None
            best_d = math.inf
            for idx, (cid, old) in enumerate(prev):
                if idx in taken:
                    continue
                d = abs(v - old)
                if d <= max(self.jump_tol, self.rel_tol * abs(old)) and d < best_d:
                    best, best_d = idx, d
            if best is None:
                ids.append(self.next_id)
                self.next_id += 1
            else:
                taken.add(best)
                ids.append(prev[best][0])
        self.last[axis] = list(zip(ids, values))
        return ids


def _roots_at_point(theta, lengths, mode, radius, kappa_max, s_max, n_grid):
    sink: list[str] = []
    channels = channels_from_angle(theta, *lengths)
    spec = ChannelMatrixSpec.from_channels(
        channels, exchange_overlap(channels), mode,
        hyperradius=radius)
    im = find_roots_imaginary(spec, kappa_max, n_grid=n_grid,
                              warning_sink=sink)
    re = find_roots_real(spec, s_max, n_grid=n_grid,
                         warning_sink=sink) if s_max else []
    return im, re, sink


def _run_points(points, worker, max_workers: int):
    if max_workers and max_workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(worker, points))
    return [worker(p) for p in points]


def theta_sweep(thetas, a_alpha, a_beta, a_gamma,
                mode: str = "asymptotic",
                hyperradius: float | None = None,
                kappa_max: float | None = None,
                s_max: float | None = None,
                n_grid: int = N_GRID,
                max_workers: int = 1) -> SweepTable:
    """Root lists over an ascending theta grid with fixed lengths/flags;
    roots on adjacent grid points are matched into labeled curves."""
    thetas = np.asarray(list(thetas), dtype=float)
    if thetas.size == 0 or np.any(np.diff(thetas) <= 0):
        raise HyperangularError("theta grid must be nonempty and ascending")
    lengths = (as_length(a_alpha), as_length(a_beta), as_length(a_gamma))

    results = _run_points(
        thetas,
        lambda t: _roots_at_point(t, lengths, mode, hyperradius,
                                  kappa_max, s_max, n_grid),
        max_workers)

    matcher = _CurveMatcher()
    rows: list[SweepRow] = []
    all_warnings: list[str] = []
    for theta, (im, re, sink) in zip(thetas, results):
        all_warnings.extend(f"theta={theta:.6g}: {w}" for w in sink)
        roots = _sorted_row_roots(im, re)
        ids: list[int] = []
        for axis in ("imaginary", "real"):
            vals = [r.value for r in roots if r.axis == axis
                    for _ in range(r.multiplicity)]
            ids.extend(matcher.assign(axis, vals))
        rows.append(SweepRow(float(theta), hyperradius, mode, roots,
                             tuple(ids)))
    window = {
        "a_alpha": lengths[0].describe(),
        "a_beta": lengths[1].describe(),
        "a_gamma": lengths[2].describe(),
    }
    return SweepTable("theta", rows, window, all_warnings)


def radius_sweep(theta: float, a_alpha, a_beta, a_gamma, radii,
                 kappa_max: float | None = 10.0,
                 s_max: float | None = None,
                 n_grid: int = N_GRID,
                 max_workers: int = 1) -> SweepTable:
    """Finite-mode root lists over an ascending log-spaced R grid at fixed
    theta.  kappa_max defaults to 10: the plateau-region curves are O(1),
    while the dimer root at sqrt(2) R/a would force a uniform grid far too
    coarse to resolve them."""
    radii = np.asarray(list(radii), dtype=float)
    if radii.size == 0 or np.any(np.diff(radii) <= 0) or radii[0] <= 0:
        raise HyperangularError("R grid must be nonempty, positive, ascending")
    lengths = (as_length(a_alpha), as_length(a_beta), as_length(a_gamma))

    results = _run_points(
        radii,
        lambda r: _roots_at_point(theta, lengths, "finite", float(r),
                                  kappa_max, s_max, n_grid),
        max_workers)

    matcher = _CurveMatcher()
    rows: list[SweepRow] = []
    all_warnings: list[str] = []
    for radius, (im, re, sink) in zip(radii, results):
        all_warnings.extend(f"R={radius:.6g}: {w}" for w in sink)
        roots = _sorted_row_roots(im, re)
        ids: list[int] = []
        for axis in ("imaginary", "real"):
            vals = [r.value for r in roots if r.axis == axis
                    for _ in range(r.multiplicity)]
            ids.extend(matcher.assign(axis, vals))
        rows.append(SweepRow(float(theta), float(radius), "finite", roots,
                             tuple(ids)))
    window = {
        "a_alpha": lengths[0].describe(),
        "a_beta": lengths[1].describe(),
        "a_gamma": lengths[2].describe(),
    }
    return SweepTable("radius", rows, window, all_warnings)


# ---------------------------------------------------------------------------
# plateau extraction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Plateau:
    curve_id: int
    kappa: float
    radius: float
    flatness: float  # |d kappa / d ln R| at the stationary point
    accepted: bool


@dataclass(frozen=True)
class PlateauSummary:
    plateaus: tuple[Plateau, ...]
    window: tuple[float, float] | None
    no_plateau_reason: str | None = None


#: scale separation below which no plateau window exists
MIN_SCALE_SEPARATION = 1e4
#: plateau acceptance bound on |d kappa / d ln R|
FLATNESS_TOL = 1e-2


def plateau_extract(table: SweepTable) -> PlateauSummary:
    """Stationary values of each imaginary root curve inside the window
    10 |a_alpha| <= R <= |a_beta| / 10 of a fixed-theta radius sweep."""
    if table.kind != "radius":
        raise HyperangularError("plateau extraction needs a radius sweep")
    try:
        a_lo = abs(float(table.window["a_alpha"]))
        a_hi = abs(float(table.window["a_beta"]))
    except (ValueError, TypeError):
        raise HyperangularError(
            "plateau extraction needs finite a_alpha and a_beta") from None
    if a_hi / a_lo < MIN_SCALE_SEPARATION:
        return PlateauSummary(
            (), None,
            f"no plateau: scale separation a_beta/a_alpha = {a_hi / a_lo:.3g}"
            f" is below {MIN_SCALE_SEPARATION:.0e}")
    lo, hi = 10.0 * a_lo, a_hi / 10.0

    plateaus = []
    for cid, points in sorted(table.curve_series("imaginary").items()):
        rs = np.array([p[1] for p in points])
        ks = np.array([p[2] for p in points])
        if rs.size < 3:
            continue
        x = np.log(rs)
        dk = np.gradient(ks, x)
        inside = (rs >= lo) & (rs <= hi)
        if np.count_nonzero(inside) < 3:
            continue
        idx = np.nonzero(inside)[0]
        best = idx[np.argmin(np.abs(dk[idx]))]
        flat = float(abs(dk[best]))
        plateaus.append(Plateau(cid, float(ks[best]), float(rs[best]), flat,
                                flat < FLATNESS_TOL))
    if not plateaus:
        return PlateauSummary((), (lo, hi),
                              "no plateau: no imaginary curve spans the window")
    return PlateauSummary(tuple(plateaus), (lo, hi))
