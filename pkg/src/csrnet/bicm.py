"""Bipartite Configuration Model: maximum-entropy link probabilities.

Every link is an independent Bernoulli variable with
``p_ia = x_i y_a / (1 + x_i y_a)``; the multipliers are fixed by requiring
the expected degree of every node to equal the observed one. The solver
works on log-multipliers ``theta = log x``, ``phi = log y`` so that
``p = expit(theta + phi)``.

Nodes with degree zero or with a full degree have degenerate multipliers
(0 or infinity). They are peeled off before solving, repeatedly, because
removing one can make another degenerate. Each peeled node records the step
at which it was removed; for a pair, the endpoint removed first fixes the
probability (0 for a zero-degree node, 1 for a full one).
"""
from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import expit, log_expit

from .errors import ConfigError, InvalidDegrees, InvalidInput, SolverDiverged
from .graph import BipartiteGraph, DegreeSequence, degrees

log = logging.getLogger(__name__)

METHODS = ("fixed-point", "quasi-newton", "newton")

ACTIVE, ZERO, FULL = 0, 1, 2
# iteration budget of the Newton retry; it converges quadratically once close
FALLBACK_ITERATIONS = 200


@dataclass(frozen=True)
class SolverConfig:
    tolerance: float = 1e-10
    max_iterations: int = 10_000
    method: str = "fixed-point"
    use_degree_classes: bool = True
    # retry with full Newton from the last iterate when `method` stalls
    fallback: bool = True

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ConfigError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ConfigError("max_iterations must be >= 1")
        if self.method not in METHODS:
            raise ConfigError(f"unknown solver method {self.method!r}; choose from {METHODS}")


@dataclass(frozen=True, eq=False)
class BicmModel:
    """Fitted multipliers plus the bookkeeping for peeled (degenerate) nodes."""

    top_log_multipliers: np.ndarray
    bottom_log_multipliers: np.ndarray
    top_state: np.ndarray
    bottom_state: np.ndarray
    top_order: np.ndarray
    bottom_order: np.ndarray
    residual: float = 0.0
    iterations: int = 0
    method: str = "fixed-point"
    config: SolverConfig = field(default_factory=SolverConfig)

    @property
    def n_top(self) -> int:
        return len(self.top_state)

    @property
    def n_bottom(self) -> int:
        return len(self.bottom_state)

    @staticmethod
    def _multipliers(logs, state):
        x = np.exp(np.where(state == ACTIVE, logs, 0.0))
        x[state == ZERO] = 0.0
        x[state == FULL] = np.inf
        return x

    @property
    def top_multipliers(self) -> np.ndarray:
        return self._multipliers(self.top_log_multipliers, self.top_state)

    @property
    def bottom_multipliers(self) -> np.ndarray:
        return self._multipliers(self.bottom_log_multipliers, self.bottom_state)

    def probabilities(self, rows=None) -> np.ndarray:
        """Dense matrix of link probabilities, optionally for a subset of top rows."""
        rows = slice(None) if rows is None else np.asarray(rows)
        tl, ts, to = self.top_log_multipliers[rows], self.top_state[rows], self.top_order[rows]
        bl, bs, bo = self.bottom_log_multipliers, self.bottom_state, self.bottom_order
        z = np.where(ts == ACTIVE, tl, 0.0)[:, None] + np.where(bs == ACTIVE, bl, 0.0)[None, :]
        p = expit(z)
        if (ts != ACTIVE).any() or (bs != ACTIVE).any():
            t_ord = np.where(ts == ACTIVE, np.inf, to)[:, None]
            b_ord = np.where(bs == ACTIVE, np.inf, bo)[None, :]
            top_first = t_ord < b_ord
            bot_first = b_ord < t_ord
            p = np.where(top_first, (ts == FULL)[:, None].astype(float), p)
            p = np.where(bot_first, (bs == FULL)[None, :].astype(float), p)
        return p

    def expected_degrees(self) -> DegreeSequence:
        p = self.probabilities()
        return DegreeSequence(p.sum(axis=1), p.sum(axis=0))

    def log_probabilities(self) -> tuple[np.ndarray, np.ndarray]:
        """``(log p, log(1 - p))`` matrices, exact at the degenerate 0/1 entries."""
        ts, bs = self.top_state, self.bottom_state
        z = np.where(ts == ACTIVE, self.top_log_multipliers, 0.0)[:, None] + \
            np.where(bs == ACTIVE, self.bottom_log_multipliers, 0.0)[None, :]
        lp, lq = log_expit(z), log_expit(-z)
        p = self.probabilities()
        degenerate = (ts != ACTIVE)[:, None] | (bs != ACTIVE)[None, :]
        with np.errstate(divide="ignore"):
            lp = np.where(degenerate, np.log(p), lp)
            lq = np.where(degenerate, np.log1p(-p), lq)
        return lp, lq


def _peel(k_top: np.ndarray, k_bot: np.ndarray):
    n_top, n_bot = len(k_top), len(k_bot)
    state_t = np.zeros(n_top, dtype=np.int8)
    state_b = np.zeros(n_bot, dtype=np.int8)
    order_t = np.full(n_top, -1, dtype=np.int64)
    order_b = np.full(n_bot, -1, dtype=np.int64)
    res_t, res_b = k_top.copy(), k_bot.copy()
    step = 0
    changed = True
    while changed:
        changed = False
        for res_self, res_other, state_self, state_other, order_self in (
            (res_t, res_b, state_t, state_b, order_t),
            (res_b, res_t, state_b, state_t, order_b),
        ):
            n_other = int((state_other == ACTIVE).sum())
            for i in np.flatnonzero(state_self == ACTIVE):
                r = res_self[i]
                if r < 0 or r > n_other:
                    raise InvalidDegrees("degree sequence is not realisable by a bipartite graph")
                if r == 0:
                    state_self[i] = ZERO
                elif r == n_other:
                    state_self[i] = FULL
                    res_other[state_other == ACTIVE] -= 1
                else:
                    continue
                order_self[i] = step
                step += 1
                changed = True
    return state_t, state_b, order_t, order_b, res_t, res_b


def _class_system(values: np.ndarray, use_classes: bool):
    if use_classes:
        uniq, inverse, counts = np.unique(values, return_inverse=True, return_counts=True)
        return uniq.astype(float), inverse, counts.astype(float)
    return values.astype(float), np.arange(len(values)), np.ones(len(values))


class _System:
    """Degree-constraint equations on class-reduced layers."""

    def __init__(self, a, u, b, w):
        self.a, self.u, self.b, self.w = a, u, b, w
        self.C = len(a)

    def evaluate(self, theta, phi):
        p = expit(theta[:, None] + phi[None, :])
        e = p @ self.w
        f = self.u @ p
        r = np.concatenate([e - self.a, f - self.b])
        return p, e, f, r


def _fixed_point(sys: _System, theta, phi, tol, max_it):
    it = 0
    _, e, _, r = sys.evaluate(theta, phi)
    while np.abs(r).max() > tol and it < max_it:
        theta = theta + np.log(sys.a) - np.log(e)
        p = expit(theta[:, None] + phi[None, :])
        phi = phi + np.log(sys.b) - np.log(sys.u @ p)
        _, e, _, r = sys.evaluate(theta, phi)
        it += 1
        if not np.isfinite(r).all():
            break
    return theta, phi, r, it


def _newton_step(sys: _System, p, r, diagonal: bool):
    q = p * (1.0 - p)
    dtheta = q @ sys.w
    dphi = sys.u @ q
    if diagonal:
        return -r / np.concatenate([dtheta, dphi])
    J = np.block([[np.diag(dtheta), q * sys.w[None, :]],
                  [(q * sys.u[:, None]).T, np.diag(dphi)]])
    # one gauge direction (theta + c, phi - c) is free; pin the last phi and
    # drop its (linearly dependent) equation
    step = np.zeros(len(r))
    step[:-1] = np.linalg.solve(J[:-1, :-1], -r[:-1])
    return step


def _newton(sys: _System, theta, phi, tol, max_it, diagonal=False):
    it = 0
    p, _, _, r = sys.evaluate(theta, phi)
    C = sys.C
    while np.abs(r).max() > tol and it < max_it:
        try:
            step = _newton_step(sys, p, r, diagonal)
        except np.linalg.LinAlgError:
            break
        norm = np.linalg.norm(r)
        alpha = 1.0
        while alpha > 1e-10:
            t_new, f_new = theta + alpha * step[:C], phi + alpha * step[C:]
            p_new, _, _, r_new = sys.evaluate(t_new, f_new)
            if np.isfinite(r_new).all() and np.linalg.norm(r_new) < norm:
                break
            alpha *= 0.5
        else:
            break
        theta, phi, p, r = t_new, f_new, p_new, r_new
        it += 1
    return theta, phi, r, it


def fit(deg: DegreeSequence, cfg: SolverConfig | None = None) -> BicmModel:
    """Solve for the multipliers reproducing ``deg`` on average."""
    cfg = cfg or SolverConfig()
    k_top = np.asarray(deg.top_degrees, dtype=np.int64)
    k_bot = np.asarray(deg.bottom_degrees, dtype=np.int64)
    if (k_top < 0).any() or (k_bot < 0).any():
        raise InvalidDegrees("negative degree")
    if k_top.sum() != k_bot.sum():
        raise InvalidDegrees(f"degree sums differ: {k_top.sum()} vs {k_bot.sum()}")
    if (k_top > len(k_bot)).any() or (k_bot > len(k_top)).any():
        raise InvalidDegrees("a degree exceeds the size of the opposite layer")

    state_t, state_b, order_t, order_b, res_t, res_b = _peel(k_top, k_bot)
    act_t, act_b = state_t == ACTIVE, state_b == ACTIVE
    theta_full = np.full(len(k_top), np.nan)
    phi_full = np.full(len(k_bot), np.nan)
    residual, iterations, method = 0.0, 0, cfg.method

    if act_t.any():
        a_vals, inv_t, u = _class_system(res_t[act_t], cfg.use_degree_classes)
        b_vals, inv_b, w = _class_system(res_b[act_b], cfg.use_degree_classes)
        sys = _System(a_vals, u, b_vals, w)
        root_e = np.sqrt(res_t[act_t].sum())
        theta, phi = np.log(a_vals / root_e), np.log(b_vals / root_e)
        if cfg.method == "fixed-point":
            theta, phi, r, iterations = _fixed_point(sys, theta, phi, cfg.tolerance, cfg.max_iterations)
        else:
            theta, phi, r, iterations = _newton(sys, theta, phi, cfg.tolerance, cfg.max_iterations,
                                                diagonal=cfg.method == "quasi-newton")
        residual = float(np.abs(r).max())
        if not residual <= cfg.tolerance and cfg.fallback and cfg.method != "newton":
            log.info("%s stalled at residual %.3e; switching to newton", cfg.method, residual)
            if not np.isfinite(theta).all() or not np.isfinite(phi).all():
                theta, phi = np.log(a_vals / root_e), np.log(b_vals / root_e)
            theta, phi, r, extra = _newton(sys, theta, phi, cfg.tolerance, FALLBACK_ITERATIONS)
            iterations += extra
            residual = float(np.abs(r).max())
            method = f"{cfg.method}+newton"
        if not residual <= cfg.tolerance:
            raise SolverDiverged("BiCM solver did not reach the degree tolerance",
                                 residual, iterations)
        # centre the gauge so the stored multipliers are reproducible
        shift = 0.5 * (np.dot(w, phi) / w.sum() - np.dot(u, theta) / u.sum())
        theta_full[act_t] = (theta + shift)[inv_t]
        phi_full[act_b] = (phi - shift)[inv_b]

    return BicmModel(theta_full, phi_full, state_t, state_b, order_t, order_b,
                     residual=residual, iterations=iterations, method=method, config=cfg)


def fit_graph(g: BipartiteGraph, cfg: SolverConfig | None = None) -> BicmModel:
    return fit(degrees(g), cfg)


def link_probability(m: BicmModel, i: int, a: int) -> float:
    if not (0 <= i < m.n_top and 0 <= a < m.n_bottom):
        raise IndexError(f"pair ({i}, {a}) outside a {m.n_top}x{m.n_bottom} model")
    return float(m.probabilities(rows=[i])[0, a])


def sample_biadjacency(m: BicmModel, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Independent Bernoulli draws from the model; shape ``(size, n_top, n_bottom)`` if size given."""
    p = m.probabilities()
    shape = p.shape if size is None else (size, *p.shape)
    return rng.random(shape) < p


def sample_graph(m: BicmModel, seed=None, top_labels=None, bottom_labels=None) -> BipartiteGraph:
    rng = np.random.default_rng(seed)
    return BipartiteGraph.from_biadjacency(sample_biadjacency(m, rng).astype(np.int8),
                                           top_labels, bottom_labels)


def graph_probability(m: BicmModel, g: BipartiteGraph | np.ndarray) -> float:
    """Log-probability of a graph under the model; ``-inf`` if impossible."""
    mat = g.to_dense() if isinstance(g, BipartiteGraph) else np.asarray(g)
    if mat.shape != (m.n_top, m.n_bottom):
        raise InvalidInput(f"graph shape {mat.shape} does not match model {(m.n_top, m.n_bottom)}")
    lp, lq = m.log_probabilities()
    mat = mat.astype(bool)
    return float(np.where(mat, lp, lq).sum())


def _floats(arr):
    return [None if not np.isfinite(v) else float(v) for v in arr]


def save_model(m: BicmModel, path: str | Path) -> None:
    Path(path).write_text(model_to_json(m), encoding="utf-8")


def model_to_json(m: BicmModel) -> str:
    doc = {
        "top_log_multipliers": _floats(m.top_log_multipliers),
        "bottom_log_multipliers": _floats(m.bottom_log_multipliers),
        "top_state": m.top_state.tolist(),
        "bottom_state": m.bottom_state.tolist(),
        "top_order": m.top_order.tolist(),
        "bottom_order": m.bottom_order.tolist(),
        "residual": m.residual,
        "iterations": m.iterations,
        "method": m.method,
        "config": asdict(m.config),
    }
    return json.dumps(doc, indent=1) + "\n"


def load_model(path: str | Path) -> BicmModel:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))

    def arr(key, dtype):
        return np.array([np.nan if v is None else v for v in doc[key]], dtype=dtype)

    return BicmModel(
        arr("top_log_multipliers", float), arr("bottom_log_multipliers", float),
        arr("top_state", np.int8), arr("bottom_state", np.int8),
        arr("top_order", np.int64), arr("bottom_order", np.int64),
        residual=doc["residual"], iterations=doc["iterations"], method=doc["method"],
        config=SolverConfig(**doc["config"]),
    )
