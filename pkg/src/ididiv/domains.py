"""Two-agent domains and single-agent projections.

A PosgDomain is a fully tabular two-agent partially observable stochastic
game from the point of view of a subject agent i interacting with a peer j.
Agent j's observation channel depends only on (next state, own action), which
is what lets j be modeled by an ordinary single-agent POMDP at level 0.

Builtins: a two-door tiger game with door creaks, and a 5x5 grid chase
between a chaser (i) and a fugitive (j) heading for a safe-house corner.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .trees import _check_symbols

__all__ = [
    "DomainValidationError",
    "SingleAgentModel",
    "PosgDomain",
    "validate_model",
    "validate_domain",
    "builtin_tiger",
    "builtin_uav",
    "builtin_domain",
    "BUILTIN_DOMAINS",
    "project_level0",
    "with_horizon",
    "load_domain",
    "serialize_domain",
    "domain_from_obj",
    "domain_to_obj",
]

_TOL = 1e-12


class DomainValidationError(ValueError):
    """A stochastic table fails normalization, shape, or labeling checks."""


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.asarray(a, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class SingleAgentModel:
    """Finite-horizon tabular POMDP.

    Parameters
    ----------
    transition : ndarray [S, A, S'] or tuple of scipy csr_array, one [S, S'] per action
        Row-stochastic per (s, a).  The sparse form is used for large
        flattened models; ``transition_matrix`` hides the difference.
    obs_fn : ndarray [S', A, O]
        Probability of each observation after landing in s' under action a.
    reward : ndarray [S, A]
    initial_belief : ndarray [S]
    horizon : int
        Number of decisions; policy trees for this model have this depth.
    """

    name: str
    states: tuple[str, ...]
    actions: tuple[str, ...]
    observations: tuple[str, ...]
    transition: object
    obs_fn: np.ndarray
    reward: np.ndarray
    initial_belief: np.ndarray
    horizon: int

    def __post_init__(self) -> None:
        if not self.is_sparse:
            object.__setattr__(self, "transition", _freeze(self.transition))
        object.__setattr__(self, "obs_fn", _freeze(self.obs_fn))
        object.__setattr__(self, "reward", _freeze(self.reward))
        object.__setattr__(self, "initial_belief", _freeze(self.initial_belief))

    @property
    def is_sparse(self) -> bool:
        return isinstance(self.transition, tuple)

    def transition_matrix(self, a: int):
        """The [S, S'] operator for action index a; supports b @ M."""
        if self.is_sparse:
            return self.transition[a]
        return self.transition[:, a, :]

    def transition_row(self, s: int, a: int) -> np.ndarray:
        if self.is_sparse:
            return np.asarray(self.transition[a][[s], :].todense()).ravel()
        return self.transition[s, a, :]

    def replace(self, **kw) -> "SingleAgentModel":
        return dataclasses.replace(self, **kw)


@dataclass(frozen=True, eq=False)
class PosgDomain:
    """Two-agent tabular game.

    Array layouts:
      transition [S, Ai, Aj, S'], obs_fn_i [S', Ai, Aj, Oi],
      obs_fn_j [S', Aj, Oj], reward_i [S, Ai, Aj], reward_j [S, Aj, Ai].
    ``start`` is the initial physical state distribution (uniform if None).
    ``level0`` optionally carries prebuilt single-agent views keyed by
    agent name ("i" or "j"); project_level0 returns these when present.
    """

    name: str
    states: tuple[str, ...]
    actions_i: tuple[str, ...]
    actions_j: tuple[str, ...]
    observations_i: tuple[str, ...]
    observations_j: tuple[str, ...]
    transition: np.ndarray
    obs_fn_i: np.ndarray
    obs_fn_j: np.ndarray
    reward_i: np.ndarray
    reward_j: np.ndarray
    horizon: int
    start: np.ndarray | None = None
    level0: Mapping[str, SingleAgentModel] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for name in ("transition", "obs_fn_i", "obs_fn_j", "reward_i", "reward_j"):
            object.__setattr__(self, name, _freeze(getattr(self, name)))
        if self.start is not None:
            object.__setattr__(self, "start", _freeze(self.start))

    def start_distribution(self) -> np.ndarray:
        if self.start is not None:
            return self.start
        n = len(self.states)
        return np.full(n, 1.0 / n)


def _check_labels(path: str, labels: Sequence[str]) -> tuple[str, ...]:
    tup = tuple(labels)
    if len(tup) == 0:
        raise DomainValidationError("%s: empty label list" % path)
    if len(set(tup)) != len(tup):
        raise DomainValidationError("%s: duplicate labels in %r" % (path, tup))
    try:
        _check_symbols(tup)
    except ValueError as exc:
        raise DomainValidationError("%s: %s" % (path, exc)) from exc
    return tup


def _check_rows(path: str, arr: np.ndarray) -> None:
    """Last axis must be a probability distribution on every row."""
    if np.any(arr < -_TOL):
        raise DomainValidationError("%s: negative probability" % path)
    sums = arr.sum(axis=-1)
    bad = np.abs(sums - 1.0) > _TOL
    if np.any(bad):
        idx = tuple(int(k) for k in np.argwhere(bad)[0])
        raise DomainValidationError(
            "%s: row %r sums to %.17g, expected 1 within %g"
            % (path, idx, float(sums[bad][0]), _TOL)
        )


def _check_shape(path: str, arr: np.ndarray, shape: tuple[int, ...]) -> None:
    if arr.shape != shape:
        raise DomainValidationError(
            "%s: shape %r, expected %r" % (path, arr.shape, shape)
        )


def validate_model(m: SingleAgentModel) -> None:
    """Raise DomainValidationError naming the offending table and row."""
    S = len(_check_labels("states", m.states))
    A = len(_check_labels("actions", m.actions))
    O = len(_check_labels("observations", m.observations))
    if m.horizon < 1:
        raise DomainValidationError("horizon: must be >= 1, got %d" % m.horizon)
    if m.is_sparse:
        if len(m.transition) != A:
            raise DomainValidationError(
                "transition: %d sparse blocks, expected %d" % (len(m.transition), A)
            )
        for a, blk in enumerate(m.transition):
            if blk.shape != (S, S):
                raise DomainValidationError(
                    "transition[%d]: shape %r, expected %r" % (a, blk.shape, (S, S))
                )
            dat = np.asarray(blk.data)
            if dat.size and dat.min() < -_TOL:
                raise DomainValidationError("transition[%d]: negative probability" % a)
            sums = np.asarray(blk.sum(axis=1)).ravel()
            bad = np.abs(sums - 1.0) > _TOL
            if np.any(bad):
                s = int(np.argwhere(bad)[0])
                raise DomainValidationError(
                    "transition[%d]: row %d sums to %.17g" % (a, s, float(sums[s]))
                )
    else:
        _check_shape("transition", m.transition, (S, A, S))
        _check_rows("transition", m.transition)
    _check_shape("obs_fn", m.obs_fn, (S, A, O))
    _check_rows("obs_fn", m.obs_fn)
    _check_shape("reward", m.reward, (S, A))
    if not np.all(np.isfinite(m.reward)):
        raise DomainValidationError("reward: non-finite entry")
    _check_shape("initial_belief", m.initial_belief, (S,))
    _check_rows("initial_belief", m.initial_belief)


def validate_domain(d: PosgDomain) -> None:
    S = len(_check_labels("states", d.states))
    Ai = len(_check_labels("actions_i", d.actions_i))
    Aj = len(_check_labels("actions_j", d.actions_j))
    Oi = len(_check_labels("observations_i", d.observations_i))
    Oj = len(_check_labels("observations_j", d.observations_j))
    if d.horizon < 1:
        raise DomainValidationError("horizon: must be >= 1, got %d" % d.horizon)
    _check_shape("transition", d.transition, (S, Ai, Aj, S))
    _check_rows("transition", d.transition)
    _check_shape("obs_fn_i", d.obs_fn_i, (S, Ai, Aj, Oi))
    _check_rows("obs_fn_i", d.obs_fn_i)
    _check_shape("obs_fn_j", d.obs_fn_j, (S, Aj, Oj))
    _check_rows("obs_fn_j", d.obs_fn_j)
    _check_shape("reward_i", d.reward_i, (S, Ai, Aj))
    _check_shape("reward_j", d.reward_j, (S, Aj, Ai))
    for nm in ("reward_i", "reward_j"):
        if not np.all(np.isfinite(getattr(d, nm))):
            raise DomainValidationError("%s: non-finite entry" % nm)
    if d.start is not None:
        _check_shape("start", d.start, (S,))
        _check_rows("start", d.start)
    for agent, model in d.level0.items():
        if agent not in ("i", "j"):
            raise DomainValidationError("level0: unknown agent %r" % agent)
        validate_model(model)


# ---------------------------------------------------------------- tiger ----

def builtin_tiger(horizon: int = 3) -> PosgDomain:
    """Two-agent tiger with growls (0.85) and door creaks (0.9).

    Both agents face the same two doors.  Opening any door relocates the
    tiger uniformly.  Agent i hears a growl direction (informative only
    when i listens) combined with a creak clue about j's door action;
    agent j hears only the growl.  Listening costs 1, a correct door pays
    +10, the tiger door costs 100, for each agent independently.
    """
    states = ("TigerLeft", "TigerRight")
    acts = ("OpenLeft", "OpenRight", "Listen")
    obs_j = ("GrowlLeft", "GrowlRight")
    creaks = ("CreakLeft", "CreakRight", "Silence")
    obs_i = tuple("%s%s" % (g, c) for g in obs_j for c in creaks)

    S, A = 2, 3
    L, R, LISTEN = 0, 1, 2

    # Opening any door resets the state uniformly; double listen keeps it.
    T = np.zeros((S, A, A, S))
    for ai in range(A):
        for aj in range(A):
            if ai == LISTEN and aj == LISTEN:
                T[:, ai, aj, :] = np.eye(S)
            else:
                T[:, ai, aj, :] = 0.5

    # Growl accuracy 0.85 for a listener, uninformative for an opener.
    def growl(s: int, act: int) -> np.ndarray:
        if act != LISTEN:
            return np.array([0.5, 0.5])
        if s == L:
            return np.array([0.85, 0.15])
        return np.array([0.15, 0.85])

    # Creak: j's open makes the matching creak likely (0.9), the opposite
    # creak and silence split the rest; listening is mostly silent.
    def creak(aj: int) -> np.ndarray:
        if aj == L:
            return np.array([0.9, 0.05, 0.05])
        if aj == R:
            return np.array([0.05, 0.9, 0.05])
        return np.array([0.05, 0.05, 0.9])

    Oi = np.zeros((S, A, A, 6))
    for s in range(S):
        for ai in range(A):
            for aj in range(A):
                Oi[s, ai, aj, :] = np.outer(growl(s, ai), creak(aj)).ravel()

    Oj = np.zeros((S, A, 2))
    for s in range(S):
        for aj in range(A):
            Oj[s, aj, :] = growl(s, aj)

    def base_reward(s: int, act: int) -> float:
        if act == LISTEN:
            return -1.0
        return -100.0 if act == s else 10.0

    Ri = np.zeros((S, A, A))
    Rj = np.zeros((S, A, A))
    for s in range(S):
        for a in range(A):
            Ri[s, a, :] = base_reward(s, a)
            Rj[s, a, :] = base_reward(s, a)

    return PosgDomain(
        name="tiger",
        states=states,
        actions_i=acts,
        actions_j=acts,
        observations_i=obs_i,
        observations_j=obs_j,
        transition=T,
        obs_fn_i=Oi,
        obs_fn_j=Oj,
        reward_i=Ri,
        reward_j=Rj,
        horizon=horizon,
        start=np.array([0.5, 0.5]),
    )


# ------------------------------------------------------------------ uav ----

_GRID = 5
_SAFE = 0  # cell (0, 0)
_UAV_MOVES = ("N", "S", "E", "W", "Stay")
_QUADS = ("NE", "NW", "SE", "SW")


def _cell_name(c: int) -> str:
    return "X%dY%d" % (c % _GRID, c // _GRID)


def _move_target(c: int, move: int) -> int:
    x, y = c % _GRID, c // _GRID
    dx, dy = ((0, 1), (0, -1), (1, 0), (-1, 0), (0, 0))[move]
    nx = min(max(x + dx, 0), _GRID - 1)
    ny = min(max(y + dy, 0), _GRID - 1)
    return ny * _GRID + nx


def _quadrant(dx: int, dy: int) -> int:
    # Ties go north and east.
    ns = "N" if dy >= 0 else "S"
    ew = "E" if dx >= 0 else "W"
    return _QUADS.index(ns + ew)


def _quad_rows(dx: np.ndarray, dy: np.ndarray) -> np.ndarray:
    """Noisy quadrant observation rows: 0.8 correct, 0.2 split over the rest."""
    n = dx.shape[0]
    rows = np.full((n, 4), 0.2 / 3.0)
    correct = np.fromiter(
        (_quadrant(int(a), int(b)) for a, b in zip(dx, dy)), dtype=int, count=n
    )
    rows[np.arange(n), correct] = 0.8
    return rows


def _uav_level0_fugitive(horizon: int) -> SingleAgentModel:
    """25-cell view of the fugitive alone: reach the safe corner.

    The safe cell is absorbing with reward 0; arrival pays +100 through the
    expected-reward encoding r(c, a) = -1 + 100 * P(next = safe | c, a),
    every other step costs 1.  Observations are the noisy quadrant of the
    safe house relative to the new cell, identical to the joint channel, so
    trees built against this model drive the fugitive in the joint game.
    """
    n = _GRID * _GRID
    A = len(_UAV_MOVES)
    T = np.zeros((n, A, n))
    R = np.zeros((n, A))
    for c in range(n):
        for a in range(A):
            if c == _SAFE:
                T[c, a, c] = 1.0
                continue
            t = _move_target(c, a)
            if t == c:
                T[c, a, c] = 1.0
            else:
                T[c, a, t] = 0.9
                T[c, a, c] = 0.1
            R[c, a] = -1.0 + 100.0 * T[c, a, _SAFE]

    cells = np.arange(n)
    dx = (_SAFE % _GRID) - (cells % _GRID)
    dy = (_SAFE // _GRID) - (cells // _GRID)
    Ob = np.repeat(_quad_rows(dx, dy)[:, None, :], A, axis=1)

    b0 = np.zeros(n)
    b0[(_GRID - 1) * _GRID + (_GRID - 1)] = 1.0  # corner opposite the safe house

    return SingleAgentModel(
        name="uav:level0:j",
        states=tuple(_cell_name(c) for c in range(n)),
        actions=_UAV_MOVES,
        observations=_QUADS,
        transition=T,
        obs_fn=Ob,
        reward=R,
        initial_belief=b0,
        horizon=horizon,
    )


def builtin_uav(horizon: int = 3) -> PosgDomain:
    """5x5 grid chase: chaser i starts at the center, fugitive j at the
    corner opposite the safe house.

    Joint states are chaser/fugitive cell pairs plus three flags: Captured
    (co-location, chaser +100 / fugitive -100), Escaped (fugitive on the
    safe cell, -100 / +100), and Done (absorbing, reward 0).  The flag
    states make the one-shot payoff a plain table lookup; every ordinary
    step costs 1.  Moves succeed with 0.9 (0.1 stay), walls block.  The
    chaser observes the fugitive's quadrant, the fugitive observes the
    safe house's quadrant, both at 0.8 accuracy.
    """
    n = _GRID * _GRID
    A = len(_UAV_MOVES)
    n_joint = n * n
    CAP, ESC, DONE = n_joint, n_joint + 1, n_joint + 2
    S = n_joint + 3

    tgt = np.array([[_move_target(c, a) for a in range(A)] for c in range(n)])

    T = np.zeros((S, A, A, S))
    for s in (CAP, ESC, DONE):
        T[s, :, :, DONE] = 1.0

    pair = np.arange(n_joint)
    ci, cj = pair // n, pair % n
    for ai in range(A):
        for aj in range(A):
            for nci, wi in ((tgt[ci, ai], 0.9), (ci, 0.1)):
                for ncj, wj in ((tgt[cj, aj], 0.9), (cj, 0.1)):
                    # Capture takes precedence over escape at the safe cell.
                    dest = np.where(
                        nci == ncj, CAP, np.where(ncj == _SAFE, ESC, nci * n + ncj)
                    )
                    np.add.at(T, (pair, ai, aj, dest), wi * wj)

    # Observation rows depend on the landed state only.
    qi = np.full((S, 4), 0.25)
    qi[:n_joint] = _quad_rows((cj % _GRID) - (ci % _GRID), (cj // _GRID) - (ci // _GRID))
    Oi = np.broadcast_to(qi[:, None, None, :], (S, A, A, 4)).copy()

    qj = np.full((S, 4), 0.25)
    qj[:n_joint] = _quad_rows((_SAFE % _GRID) - (cj % _GRID), (_SAFE // _GRID) - (cj // _GRID))
    Oj = np.broadcast_to(qj[:, None, :], (S, A, 4)).copy()

    Ri = np.full((S, A, A), -1.0)
    Rj = np.full((S, A, A), -1.0)
    Ri[CAP], Rj[CAP] = 100.0, -100.0
    Ri[ESC], Rj[ESC] = -100.0, 100.0
    Ri[DONE], Rj[DONE] = 0.0, 0.0

    start = np.zeros(S)
    center = (_GRID // 2) * _GRID + (_GRID // 2)
    corner = (_GRID - 1) * _GRID + (_GRID - 1)
    start[center * n + corner] = 1.0

    names = tuple(
        "%s@%s" % (_cell_name(a), _cell_name(b)) for a in range(n) for b in range(n)
    ) + ("Captured", "Escaped", "Done")

    return PosgDomain(
        name="uav",
        states=names,
        actions_i=_UAV_MOVES,
        actions_j=_UAV_MOVES,
        observations_i=_QUADS,
        observations_j=_QUADS,
        transition=T,
        obs_fn_i=Oi,
        obs_fn_j=Oj,
        reward_i=Ri,
        reward_j=Rj,
        horizon=horizon,
        start=start,
        level0={"j": _uav_level0_fugitive(horizon)},
    )


BUILTIN_DOMAINS = {"tiger": builtin_tiger, "uav": builtin_uav}


def builtin_domain(name: str, horizon: int | None = None) -> PosgDomain:
    try:
        builder = BUILTIN_DOMAINS[name]
    except KeyError:
        raise KeyError(
            "unknown builtin domain %r (have: %s)"
            % (name, ", ".join(sorted(BUILTIN_DOMAINS)))
        ) from None
    return builder() if horizon is None else builder(horizon)


# ------------------------------------------------------------ projection ----

def project_level0(
    domain: PosgDomain,
    agent: str,
    peer_rule: str | np.ndarray = "uniform",
) -> SingleAgentModel:
    """Single-agent POMDP for one agent with the peer folded out.

    A prebuilt view on the domain wins when present.  Otherwise the peer's
    action is marginalized under ``peer_rule``: "uniform" or an explicit
    distribution over the peer's declared actions.
    """
    if agent not in ("i", "j"):
        raise ValueError("agent must be 'i' or 'j', got %r" % agent)
    if agent in domain.level0:
        return domain.level0[agent].replace(horizon=domain.horizon)

    peer_acts = domain.actions_j if agent == "i" else domain.actions_i
    if isinstance(peer_rule, str):
        if peer_rule != "uniform":
            raise ValueError("unknown peer rule %r" % peer_rule)
        w = np.full(len(peer_acts), 1.0 / len(peer_acts))
    else:
        w = np.asarray(peer_rule, dtype=float)
        if w.shape != (len(peer_acts),):
            raise ValueError(
                "peer rule needs %d weights, got shape %r" % (len(peer_acts), w.shape)
            )
        if abs(w.sum() - 1.0) > _TOL or w.min() < -_TOL:
            raise ValueError("peer rule is not a distribution")

    b0 = domain.start_distribution()
    if agent == "j":
        T = np.einsum("a,sawt->swt", w, domain.transition)
        Ob = domain.obs_fn_j.copy()
        R = np.einsum("swa,a->sw", domain.reward_j, w)
        acts, obs = domain.actions_j, domain.observations_j
    else:
        T = np.einsum("w,sawt->sat", w, domain.transition)
        Ob = np.einsum("w,sawo->sao", w, domain.obs_fn_i)
        R = np.einsum("saw,w->sa", domain.reward_i, w)
        acts, obs = domain.actions_i, domain.observations_i

    return SingleAgentModel(
        name="%s:level0:%s" % (domain.name, agent),
        states=domain.states,
        actions=acts,
        observations=obs,
        transition=T,
        obs_fn=Ob,
        reward=R,
        initial_belief=b0,
        horizon=domain.horizon,
    )


def with_horizon(domain: PosgDomain, horizon: int) -> PosgDomain:
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    level0 = {k: m.replace(horizon=horizon) for k, m in domain.level0.items()}
    return dataclasses.replace(domain, horizon=horizon, level0=level0)


# ----------------------------------------------------------------- files ----

def domain_to_obj(domain: PosgDomain) -> dict:
    obj = {
        "name": domain.name,
        "states": list(domain.states),
        "actions_i": list(domain.actions_i),
        "actions_j": list(domain.actions_j),
        "observations_i": list(domain.observations_i),
        "observations_j": list(domain.observations_j),
        "horizon": domain.horizon,
        "transition": domain.transition.tolist(),
        "obs_i": domain.obs_fn_i.tolist(),
        "obs_j": domain.obs_fn_j.tolist(),
        "reward_i": domain.reward_i.tolist(),
        "reward_j": domain.reward_j.tolist(),
    }
    if domain.start is not None:
        obj["start"] = domain.start.tolist()
    return obj


def domain_from_obj(obj: Mapping) -> PosgDomain:
    required = [
        "name", "states", "actions_i", "actions_j", "observations_i",
        "observations_j", "horizon", "transition", "obs_i", "obs_j",
        "reward_i", "reward_j",
    ]
    missing = [k for k in required if k not in obj]
    if missing:
        raise DomainValidationError("missing keys: %s" % ", ".join(missing))
    domain = PosgDomain(
        name=str(obj["name"]),
        states=tuple(obj["states"]),
        actions_i=tuple(obj["actions_i"]),
        actions_j=tuple(obj["actions_j"]),
        observations_i=tuple(obj["observations_i"]),
        observations_j=tuple(obj["observations_j"]),
        transition=np.asarray(obj["transition"], dtype=float),
        obs_fn_i=np.asarray(obj["obs_i"], dtype=float),
        obs_fn_j=np.asarray(obj["obs_j"], dtype=float),
        reward_i=np.asarray(obj["reward_i"], dtype=float),
        reward_j=np.asarray(obj["reward_j"], dtype=float),
        horizon=int(obj["horizon"]),
        start=None if "start" not in obj else np.asarray(obj["start"], dtype=float),
    )
    validate_domain(domain)
    return domain


def serialize_domain(domain: PosgDomain) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(domain_to_obj(domain), sort_keys=True, indent=2) + "\n"


def load_domain(source) -> PosgDomain:
    """Load from a mapping, a JSON string, or a path to a JSON file."""
    if isinstance(source, Mapping):
        return domain_from_obj(source)
    if isinstance(source, Path) or (
        isinstance(source, str) and not source.lstrip().startswith("{")
    ):
        text = Path(source).read_text()
    else:
        text = source
    return domain_from_obj(json.loads(text))
