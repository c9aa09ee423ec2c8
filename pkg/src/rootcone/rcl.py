"""Per-element root cone systems and their verification.

For a Weyl element ``w`` and diagram automorphism ``theta``, a point
``lam = sum_i x_i varpi_i`` of the open chamber (all ``x_i > 0``) is a witness
when

    < lam - theta^{-1} w^{-1} lam - gamma, varpi_beta^vee >  >  0

for every ``beta`` in the support of ``w`` (the simple roots whose
fundamental coweight ``w`` moves).  With ``gamma = 0`` the system is a
homogeneous strict cone problem in ``x``.

Row coefficients are computed in weight coordinates, where
``<varpi_j, varpi_beta^vee>`` is the entry ``(beta, j)`` of the inverse Cartan
matrix and every Weyl element is an integer matrix.
"""

from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import floor
from typing import Optional, Sequence

import numpy as np

from . import _accel
from .automorphism import DiagramAutomorphism, make_automorphism, standard_automorphism, validate
from .cone import StrictConeProblem, grid_search, solve_strict, verify_witness
from .errors import CounterexampleFound, GridExhausted, RecipeFailure, StrategyUnavailable
from .exact import RatMat, RatVec, dot
from .root_datum import RootDatum, build, from_cartan_matrix, resolve_datum
from .weyl import WeylElement, WeylGroup, weyl_group

log = logging.getLogger(__name__)

STRATEGIES = ("certified", "lp", "grid", "all")
GAMMA_MODES = ("zero", "gamma-w")

VERIFIED = "verified"
VACUOUS = "vacuous"
FAILED = "failed"


@dataclass(frozen=True, eq=False)
class TwistedSetup:
    datum: RootDatum
    theta: DiagramAutomorphism
    group: WeylGroup

    @classmethod
    def create(cls, datum: RootDatum, theta: DiagramAutomorphism, allow_large: bool = False) -> "TwistedSetup":
        if theta.datum is not datum:
            raise ValueError("automorphism belongs to a different datum")
        if not validate(theta):
            raise ValueError("automorphism does not preserve the Cartan matrix")
        return cls(datum, theta, weyl_group(datum, allow_large=allow_large))

    def __repr__(self):
        return f"TwistedSetup({self.datum.name}, theta={self.theta.name}{list(self.theta.perm)})"

    @property
    def rank(self) -> int:
        return self.datum.rank

    @property
    def spec(self) -> tuple:
        """Picklable recipe from which a worker rebuilds an equal setup."""
        d = self.datum
        if d.name == "custom":
            type_part = ("cartan", [[int(x) for x in r] for r in d.cartan_matrix.tolist()])
        else:
            type_part = ("type", str(d.cartan_type))
        return type_part, self.theta.perm, self.theta.name

    @cached_property
    def pairing(self) -> RatMat:
        """``pairing[beta][j] = <varpi_j, varpi_beta^vee>``."""
        return self.datum.inverse_cartan

    @cached_property
    def eta_rows_scaled(self) -> tuple[np.ndarray, int]:
        """``(N, D)``: full coefficient matrices ``N[k] / D`` for every group element."""
        inv, den = self.datum.inverse_cartan_scaled
        r = self.rank
        tinv = self.theta.inverse_weight_matrix
        lin = np.eye(r, dtype=np.int64)[None] - np.einsum("ab,kbc->kac", tinv, self.group.inverse_matrices)
        return np.einsum("ab,kbc->kac", inv, lin), den


def setup_from_spec(spec: tuple, allow_large: bool = False) -> TwistedSetup:
    (kind, value), perm, name = spec
    datum = from_cartan_matrix(value) if kind == "cartan" else build(value)
    theta = make_automorphism(datum, perm, name)
    return TwistedSetup.create(datum, theta, allow_large=allow_large)


def make_setup(type_spec: str, auto: str = "identity", allow_large: bool = False) -> TwistedSetup:
    datum = resolve_datum(type_spec)
    theta = standard_automorphism(datum, auto)
    return TwistedSetup.create(datum, theta, allow_large=allow_large)


# --- rows -----------------------------------------------------------------


def support(setup: TwistedSetup, w: WeylElement) -> tuple[int, ...]:
    eye = np.eye(setup.rank, dtype=np.int64)
    return tuple(int(i) for i in np.nonzero(np.any(w.matrix != eye, axis=0))[0])


def eta_rows(setup: TwistedSetup, w: WeylElement) -> RatMat:
    """Row ``beta``, column ``i``: ``<varpi_i - theta^{-1} w^{-1} varpi_i, varpi_beta^vee>``."""
    r = setup.rank
    lin = np.eye(r, dtype=np.int64) - setup.theta.inverse_weight_matrix @ w.inverse_matrix
    return setup.pairing @ RatMat(lin.tolist())


def eta_rows_ambient(setup: TwistedSetup, w: WeylElement) -> RatMat:
    """The same rows computed from ambient actions and coweights directly."""
    d = setup.datum
    winv = setup.group.inverse(w).action
    tinv = setup.theta.inverse_induced
    cols = []
    for om in d.fundamental_weights:
        v = om - tinv @ (winv @ om)
        cols.append([dot(v, c) for c in d.fundamental_coweights])
    return RatMat(list(zip(*cols)))


def gamma_vector(setup: TwistedSetup, w: WeylElement) -> RatVec:
    """``1/2 (1 - theta^{-1}) (sum_{a>0, wa>0} a - sum_{b>0, wb<0} b)`` in the ambient space."""
    d = setup.datum
    act = w.action
    acc = RatVec.zeros(d.ambient_dim)
    for a in d.positive_roots:
        c = d.root_coords(act @ a)
        acc = acc + (a if any(x > 0 for x in c) else -a)
    half = acc * Fraction(1, 2)
    return half - setup.theta.inverse_induced @ half


def gamma_weight_coords_batch(setup: TwistedSetup, backend: str | None = None) -> np.ndarray:
    """gamma(w, theta) in weight coordinates for every element, shape (K, r), integral.

    Uses ``1/2 (sum_{wa>0} a - sum_{wb<0} b) = rho - sum_{b in N(w)} b`` with
    ``rho = (1, ..., 1)`` in weight coordinates.
    """
    d = setup.datum
    _, masks = setup.group.inversion_data(backend=backend)
    roots_w = d.positive_root_weights  # (r, N)
    inv_sum = masks.astype(np.int64) @ roots_w.T  # (K, r)
    base = 1 - inv_sum
    lin = np.eye(setup.rank, dtype=np.int64) - setup.theta.inverse_weight_matrix
    return base @ lin.T


def gamma_pairings(setup: TwistedSetup, gamma: RatVec) -> RatVec:
    """``<gamma, varpi_beta^vee>`` for every simple root."""
    return RatVec(dot(gamma, c) for c in setup.datum.fundamental_coweights)


@dataclass(frozen=True)
class RclInstance:
    w: WeylElement
    support: tuple[int, ...]
    gamma: Optional[RatVec]
    problem: StrictConeProblem

    @property
    def vacuous(self) -> bool:
        return not self.support


def build_instance(setup: TwistedSetup, w: WeylElement, gamma: Optional[RatVec] = None) -> RclInstance:
    supp = support(setup, w)
    rows = eta_rows(setup, w).select_rows(supp)
    offsets = None
    if gamma is not None:
        g = gamma_pairings(setup, gamma)
        offsets = RatVec(-g[b] for b in supp)
    return RclInstance(w, supp, gamma, StrictConeProblem(rows, chamber=True, offsets=offsets))


def _instance_from_scaled(setup, w, supp, rows_int, den) -> RclInstance:
    rows = RatMat([[Fraction(int(v), den) for v in rows_int[b]] for b in supp], ncols=setup.rank)
    return RclInstance(w, supp, None, StrictConeProblem(rows, chamber=True))


# --- coefficient-sum and T-cone checks ------------------------------------


def coefficient_sum(setup: TwistedSetup, v: RatVec) -> Fraction:
    """Sum of the simple-root coefficients of ``v``: ``sum_beta <v, varpi_beta^vee>``."""
    return sum((dot(v, c) for c in setup.datum.fundamental_coweights), Fraction(0))


def sum_coeffs_check(setup: TwistedSetup, lam: RatVec, w: WeylElement) -> tuple[Fraction, Fraction]:
    """``(S1, S2)``: coefficient sums of ``(1 - theta^{-1}) lam`` and ``lam - theta^{-1} w^{-1} lam``.

    S1 vanishes for every ``lam``; S2 is positive for ``lam`` in the open
    chamber and ``w != 1`` (both preconditions are enforced).
    """
    d = setup.datum
    if not d.is_positive_chamber(lam):
        raise ValueError("lam must lie in the open positive chamber")
    if w.is_identity:
        raise ValueError("w must not be the identity")
    tinv = setup.theta.inverse_induced
    s1 = coefficient_sum(setup, lam - tinv @ lam)
    winv = setup.group.inverse(w).action
    s2 = coefficient_sum(setup, lam - tinv @ (winv @ lam))
    return s1, s2


@dataclass(frozen=True)
class TConeReport:
    value: Fraction  # <eta(lam(x), w, theta), T1> at the given witness
    scale: int  # smallest integer t >= 1 with a positive value at t * x
    scaled_value: Fraction


def t_cone_check(setup: TwistedSetup, w: WeylElement, x: Sequence) -> TConeReport:
    """Pair the shifted vector eta (gamma = gamma(w, theta)) with ``T1 = sum varpi^vee``."""
    if w.is_identity:
        raise ValueError("t_cone_check needs a non-vacuous element")
    x = RatVec(x)
    if not all(v > 0 for v in x):
        raise ValueError("witness must lie in the open chamber")
    d = setup.datum
    lam = d.from_weight_coords(x)
    winv = setup.group.inverse(w).action
    lin = coefficient_sum(setup, lam - setup.theta.inverse_induced @ (winv @ lam))
    g = coefficient_sum(setup, gamma_vector(setup, w))
    value = lin - g
    if value > 0:
        t = 1
    elif lin > 0:
        t = max(1, floor(g / lin) + 1)
    else:
        raise ValueError("no positive scale exists: linear part is not positive")
    return TConeReport(value, t, t * lin - g)


def gamma_shift_scale(margins: Sequence, shifts: Sequence) -> int:
    """Smallest integer ``t >= 1`` with ``t * m_beta - g_beta > 0`` for all rows.

    ``margins`` are the homogeneous row values ``m_beta > 0`` at a witness and
    ``shifts`` the values ``g_beta = <gamma, varpi_beta^vee>``.
    """
    ratio = None
    for m, g in zip(margins, shifts):
        m, g = Fraction(m), Fraction(g)
        if m <= 0:
            raise ValueError("homogeneous margins must be positive")
        q = g / m
        ratio = q if ratio is None or q > ratio else ratio
    if ratio is None or ratio <= 0:
        return 1
    return max(1, floor(ratio) + 1)


# --- certificates -----------------------------------------------------------


@dataclass(frozen=True)
class WitnessCertificate:
    word: tuple[int, ...]
    support: tuple[int, ...]
    witness: Optional[RatVec]
    margins: RatVec
    strategy: str
    vacuous: bool
    status: str = VERIFIED
    checked_by: tuple[str, ...] = ()
    scale: int = 1
    counterexample: Optional[tuple[int, ...]] = None
    note: str = ""


@dataclass
class Summary:
    verified: int = 0
    vacuous: int = 0
    failed: int = 0
    wall_time_ms: int = 0
    notes: list = field(default_factory=list)

    @property
    def total(self) -> int:
        return self.verified + self.vacuous + self.failed


def _recheck(inst: RclInstance, x: RatVec, label: str) -> RatVec:
    vals = verify_witness(inst.problem, x)
    if not all(v > 0 for v in vals):
        raise RecipeFailure(f"{label} witness {list(x)} fails re-verification for word {inst.w.word}")
    return vals


def _lp_witness(inst: RclInstance) -> RatVec:
    res = solve_strict(inst.problem)
    if not res.feasible:
        raise CounterexampleFound(f"no strict solution for word {inst.w.word}", inst.w.word, res.certificate)
    return res.witness


def _grid_witness(inst: RclInstance, grid_max: int, hint=None) -> RatVec:
    if hint is not None:
        if hint < 0:
            raise GridExhausted(f"grid {{1..{grid_max}}} exhausted for word {inst.w.word}")
        return RatVec(_accel.decode_grid_index(int(hint), grid_max, inst.problem.var_dim))
    x = grid_search(inst.problem, grid_max)
    if x is None:
        raise GridExhausted(f"grid {{1..{grid_max}}} exhausted for word {inst.w.word}")
    return x


def _certify(
    setup: TwistedSetup,
    inst: RclInstance,
    strategy: str,
    grid_max: int,
    gamma_shifts: Optional[RatVec] = None,
    grid_hint=None,
) -> WitnessCertificate:
    from . import certified

    w = inst.w
    if inst.vacuous:
        return WitnessCertificate(w.word, (), None, RatVec(), strategy, True, VACUOUS)
    notes = []
    checked: list[str] = []
    x = None
    used = strategy
    if strategy == "lp":
        x = _lp_witness(inst)
        checked.append("lp")
    elif strategy == "grid":
        try:
            x = _grid_witness(inst, grid_max, grid_hint)
            checked.append("grid")
        except GridExhausted as e:
            notes.append(str(e) + "; escalated to lp")
            x = _lp_witness(inst)
            used = "lp"
            checked.append("lp")
    elif strategy in ("certified", "all"):
        if strategy == "all":
            lp_x = _lp_witness(inst)
            _recheck(inst, lp_x, "lp")
            checked.append("lp")
        cw = None
        if certified.available(setup) is not None:
            try:
                cw = certified.certified_witness(setup, inst, grid_max, grid_hint=grid_hint)
            except GridExhausted as e:
                notes.append(str(e) + "; escalated to lp")
        elif strategy == "certified":
            raise StrategyUnavailable(f"no certified construction for {setup}")
        if cw is not None:
            x = cw.x
            used = "certified"
            checked.insert(0, "certified")
            if cw.detail:
                notes.append(cw.detail)
        else:
            x = lp_x if strategy == "all" else _lp_witness(inst)
            used = "lp"
            if "lp" not in checked:
                checked.append("lp")
        if strategy == "all":
            try:
                gx = _grid_witness(inst, grid_max, grid_hint)
                _recheck(inst, gx, "grid")
                checked.append("grid")
            except GridExhausted as e:
                notes.append(str(e))
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    vals = _recheck(inst, x, used)
    nrows = len(inst.support)
    margins = RatVec(vals[:nrows])
    scale = 1
    if gamma_shifts is not None:
        shifts = [gamma_shifts[b] for b in inst.support]
        scale = gamma_shift_scale(margins, shifts)
        x = x * scale
        margins = RatVec(scale * m - g for m, g in zip(margins, shifts))
        if not all(m > 0 for m in margins):
            raise AssertionError("gamma-shifted witness failed")
    return WitnessCertificate(
        w.word, inst.support, x, margins, used, False, VERIFIED, tuple(checked), scale, None, "; ".join(notes)
    )


def verify_element(
    setup: TwistedSetup,
    w: WeylElement,
    strategy: str = "all",
    grid_max: int = 3,
    gamma_mode: str = "zero",
) -> WitnessCertificate:
    """Certificate for one element; raises CounterexampleFound on an infeasible instance."""
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if gamma_mode not in GAMMA_MODES:
        raise ValueError(f"unknown gamma mode {gamma_mode!r}")
    inst = build_instance(setup, w)
    shifts = None
    if gamma_mode == "gamma-w" and not inst.vacuous:
        shifts = gamma_pairings(setup, gamma_vector(setup, w))
    return _certify(setup, inst, strategy, grid_max, shifts)


def _failed(w: WeylElement, supp, strategy: str, exc: Exception) -> WitnessCertificate:
    cert = getattr(exc, "certificate", None)
    return WitnessCertificate(
        w.word, tuple(supp), None, RatVec(), strategy, False, FAILED, (), 1,
        tuple(cert) if cert is not None else None, f"{type(exc).__name__}: {exc}",
    )


def _run_chunk(setup: TwistedSetup, indices: Sequence[int], strategy: str, grid_max: int, gamma_mode: str):
    from . import certified

    g = setup.group
    idx = np.asarray(indices, dtype=np.int64)
    rows_all, den = setup.eta_rows_scaled
    masks = g.support_masks[idx]
    rows = rows_all[idx]
    hints = None
    need_grid = strategy in ("grid", "all") or (strategy == "certified" and certified.available(setup) == "e6")
    if need_grid:
        r = setup.rank
        packed = np.zeros_like(rows)
        nrows = masks.sum(axis=1)
        for a in range(len(idx)):
            sel = np.nonzero(masks[a])[0]
            packed[a, : len(sel)] = rows[a][sel]
        hints = _accel.grid_first_batch(packed, np.zeros((len(idx), r), dtype=np.int64), nrows, grid_max)
    shifts_all = None
    if gamma_mode == "gamma-w":
        gw = gamma_weight_coords_batch(setup)[idx]
        inv, iden = setup.datum.inverse_cartan_scaled
        shifts_all = (gw @ inv.T, iden)
    out = []
    for a, k in enumerate(idx):
        w = g.elements[int(k)]
        supp = tuple(int(i) for i in np.nonzero(masks[a])[0])
        inst = _instance_from_scaled(setup, w, supp, rows[a], den)
        shifts = None
        if shifts_all is not None:
            sv, sd = shifts_all
            shifts = RatVec(Fraction(int(v), sd) for v in sv[a])
        try:
            cert = _certify(setup, inst, strategy, grid_max, shifts, None if hints is None else int(hints[a]))
        except (CounterexampleFound, RecipeFailure) as e:
            log.warning("element %s failed: %s", w.word, e)
            cert = _failed(w, supp, strategy, e)
        out.append((int(k), cert))
    return out


_WORKER_SETUP: Optional[TwistedSetup] = None


def _worker_init(spec):
    global _WORKER_SETUP
    _WORKER_SETUP = setup_from_spec(spec, allow_large=True)


def _worker_run(args):
    indices, strategy, grid_max, gamma_mode = args
    return _run_chunk(_WORKER_SETUP, indices, strategy, grid_max, gamma_mode)


def default_jobs() -> int:
    env = os.environ.get("RCL_JOBS")
    if env:
        return max(1, int(env))
    return max(1, len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1))


def verify_all(
    setup: TwistedSetup,
    strategy: str = "all",
    gamma_mode: str = "zero",
    grid_max: int = 3,
    jobs: int = 1,
    indices: Optional[Sequence[int]] = None,
) -> tuple[list[WitnessCertificate], Summary]:
    """One certificate per element, in canonical (shortlex) order.

    Counterexamples and failed recipes are recorded as ``failed`` certificates;
    the remaining elements are still processed.
    """
    from . import certified

    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if gamma_mode not in GAMMA_MODES:
        raise ValueError(f"unknown gamma mode {gamma_mode!r}")
    if strategy == "certified" and certified.available(setup) is None:
        raise StrategyUnavailable(f"no certified construction for {setup}")
    t0 = time.perf_counter()
    all_idx = list(range(len(setup.group))) if indices is None else sorted(indices)
    if jobs <= 1 or len(all_idx) < 64:
        results = _run_chunk(setup, all_idx, strategy, grid_max, gamma_mode)
    else:
        nchunks = jobs * 4
        chunks = [all_idx[i::nchunks] for i in range(nchunks)]
        chunks = [c for c in chunks if c]
        results = []
        with ProcessPoolExecutor(max_workers=jobs, initializer=_worker_init, initargs=(setup.spec,)) as ex:
            for part in ex.map(_worker_run, [(c, strategy, grid_max, gamma_mode) for c in chunks]):
                results.extend(part)
    results.sort(key=lambda kv: kv[0])
    certs = [c for _, c in results]
    summary = Summary()
    for c in certs:
        if c.status == VERIFIED:
            summary.verified += 1
        elif c.status == VACUOUS:
            summary.vacuous += 1
        else:
            summary.failed += 1
    summary.wall_time_ms = int(round((time.perf_counter() - t0) * 1000))
    return certs, summary


# --- cyclically permuted products ------------------------------------------


def split_product_element(setup: TwistedSetup, w: WeylElement) -> tuple[RootDatum, list[WeylElement]]:
    """Factor elements ``w_k`` of ``w`` on ``d`` identical copies of one datum."""
    t = setup.datum.cartan_type
    if not t.is_product or len(set(t.factors)) != 1:
        raise ValueError("product of identical factors required")
    h = build(t.factors[0])
    hg = weyl_group(h)
    rh = h.rank
    parts = []
    for k in range(len(t.factors)):
        blk = w.matrix[k * rh : (k + 1) * rh, k * rh : (k + 1) * rh]
        parts.append(hg.lookup(blk))
    return h, parts


def product_reduction(h_datum: RootDatum, factors: Sequence[WeylElement]) -> tuple[RatVec, list[str]]:
    """Chamber coordinates for ``(w_1, ..., w_d)`` on ``H^d`` with the cycle copy k -> k+1.

    For each simple root ``beta`` of H: if some but not all ``w_k`` move
    ``varpi_beta``, pick the first copy ``i`` that does not and assign strictly
    decreasing values ``d, d-1, ..., 1`` to copies ``i+1, i+2, ..., i`` (cyclic);
    if all move it, assign equal values; if none, any positive value.
    Returns ``x`` in product weight coordinates (copy-major) and the case per root.
    """
    d = len(factors)
    if d < 2:
        raise ValueError("need at least two factors")
    if any(f.datum is not h_datum for f in factors):
        raise ValueError("factor mismatch: every w_k must belong to the same datum H")
    rh = h_datum.rank
    eye = np.eye(rh, dtype=np.int64)
    supports = [set(np.nonzero(np.any(f.matrix != eye, axis=0))[0].tolist()) for f in factors]
    x = [[Fraction(1)] * rh for _ in range(d)]
    cases = []
    for b in range(rh):
        hit = [k for k in range(d) if b in supports[k]]
        if len(hit) == d:
            cases.append("all")
        elif not hit:
            cases.append("none")
        else:
            i = next(k for k in range(d) if b not in supports[k])
            for step in range(d):
                x[(i + 1 + step) % d][b] = Fraction(d - step)
            cases.append(f"chain@{i}")
    return RatVec(v for row in x for v in row), cases
