"""Social graph and action-log ingestion.

Turns raw edge/event files into the structures everything else consumes:
the social graph, the time-ordered action log, per-action propagation DAGs,
learned propagation-delay / influenceability parameters, and the ranked
train/test split of propagation traces.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NotFoundError, ParseError, PreconditionError, ValidationError


class SocialGraph:
    """Directed, unweighted social graph. Immutable after construction.

    Nodes are integer user ids.  Self-loops are rejected; duplicate edges
    are collapsed.  Isolated nodes may be supplied via ``nodes``.
    """

    def __init__(self, edges, nodes=()):
        node_set = set(nodes)
        edge_set = set()
        for v, u in edges:
            if v == u:
                raise ValidationError(f"self-loop on node {v}")
            edge_set.add((v, u))
            node_set.add(v)
            node_set.add(u)
        self.nodes = frozenset(node_set)
        self.edges = frozenset(edge_set)
        out = {n: [] for n in node_set}
        inn = {n: [] for n in node_set}
        for v, u in edge_set:
            out[v].append(u)
            inn[u].append(v)
        self.out_neighbors = {n: tuple(sorted(vs)) for n, vs in out.items()}
        self.in_neighbors = {n: tuple(sorted(vs)) for n, vs in inn.items()}
        self.in_sets = {n: frozenset(vs) for n, vs in inn.items()}

    def out_degree(self, u):
        return len(self.out_neighbors[u])

    def in_degree(self, u):
        return len(self.in_neighbors[u])

    def __contains__(self, u):
        return u in self.nodes

    def __repr__(self):
        return f"SocialGraph({len(self.nodes)} nodes, {len(self.edges)} edges)"


def load_social_graph(path) -> SocialGraph:
    """Read a graph from a file of ``src<TAB>dst`` integer pairs."""
    edges = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ParseError(f"{path}:{lineno}: expected 'src<TAB>dst', got {raw!r}")
            try:
                v, u = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(f"{path}:{lineno}: non-integer id in {raw!r}") from None
            if v == u:
                raise ValidationError(f"{path}:{lineno}: self-loop {v}->{u}")
            edges.append((v, u))
    return SocialGraph(edges)


class ActionLog:
    """Chronological record of (user, action, time) performances.

    Entries are kept sorted by (action, time, user).  A user performs an
    action at most once, and every user must be a node of the social graph.
    """

    def __init__(self, entries, graph: SocialGraph):
        seen = set()
        for user, action, t in entries:
            if user not in graph.nodes:
                raise ValidationError(f"user {user} in log but not in social graph")
            key = (user, action)
            if key in seen:
                raise ValidationError(f"user {user} performs action {action} twice")
            seen.add(key)
        ordered = sorted(entries, key=lambda e: (e[1], e[2], e[0]))
        self.entries = [(int(u), int(a), int(t)) for u, a, t in ordered]

        performances = {}
        num_performed = {}
        by_user = {}
        for user, action, t in self.entries:
            performances.setdefault(action, []).append((t, user))
            num_performed[user] = num_performed.get(user, 0) + 1
            by_user.setdefault(user, []).append(action)
        self.performances = {a: tuple(rows) for a, rows in performances.items()}
        self.actions = tuple(sorted(performances))
        self.num_performed = num_performed
        self.actions_by_user = {u: tuple(a) for u, a in by_user.items()}

    def action_size(self, action) -> int:
        return len(self.performances[action])

    def restricted_to(self, actions) -> "ActionLog":
        """A new log containing only the given actions (e.g. a train split)."""
        keep = set(actions)
        sub = ActionLog.__new__(ActionLog)
        sub.entries = [e for e in self.entries if e[1] in keep]
        performances = {a: rows for a, rows in self.performances.items() if a in keep}
        sub.performances = performances
        sub.actions = tuple(sorted(performances))
        num_performed = {}
        by_user = {}
        for user, action, _ in sub.entries:
            num_performed[user] = num_performed.get(user, 0) + 1
            by_user.setdefault(user, []).append(action)
        sub.num_performed = num_performed
        sub.actions_by_user = {u: tuple(a) for u, a in by_user.items()}
        return sub

    def __len__(self):
        return len(self.entries)

    def __repr__(self):
        return f"ActionLog({len(self.entries)} tuples, {len(self.actions)} actions)"


def load_action_log(path, graph: SocialGraph) -> ActionLog:
    """Read a log from a file of ``user<TAB>action<TAB>time`` lines (any order)."""
    entries = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ParseError(
                    f"{path}:{lineno}: expected 'user<TAB>action<TAB>time', got {raw!r}"
                )
            try:
                entries.append((int(parts[0]), int(parts[1]), int(parts[2])))
            except ValueError:
                raise ParseError(f"{path}:{lineno}: non-integer field in {raw!r}") from None
    return ActionLog(entries, graph)


class PropagationDag:
    """Who-influenced-whom DAG of a single action.

    There is an edge (v, u) exactly when (v, u) is a social edge and v
    performed the action strictly before u; ties in time produce no edge,
    so acyclicity is guaranteed.
    """

    def __init__(self, action, order, parents):
        self.action = action
        self.order = order                      # tuple of (time, user), time-sorted
        self.times = {u: t for t, u in order}
        self.parents = parents                  # user -> sorted tuple of parents

    @property
    def nodes(self):
        return self.times.keys()

    def in_degree(self, u) -> int:
        return len(self.parents[u])

    def __contains__(self, u):
        return u in self.times

    def __len__(self):
        return len(self.times)


def build_propagation_dag(log: ActionLog, graph: SocialGraph, action) -> PropagationDag:
    """Materialize the propagation DAG of one action from the log."""
    if action not in log.performances:
        raise NotFoundError(f"action {action} not present in the log")
    order = log.performances[action]
    times = {u: t for t, u in order}
    parents = {}
    for t, u in order:
        parents[u] = tuple(
            v for v in graph.in_neighbors.get(u, ()) if v in times and times[v] < t
        )
    return PropagationDag(action, order, parents)


def extract_initiators(dag: PropagationDag) -> set:
    """Users who performed the action before any of their neighbors."""
    return {u for u, ps in dag.parents.items() if not ps}


@dataclass
class TemporalParams:
    """Learned per-edge mean propagation delays and per-user influenceability."""

    tau: dict                # (v, u) -> mean delay in seconds, > 0
    infl: dict               # u -> fraction of u's actions performed under influence
    global_tau: float        # pooled mean delay, fallback for unseen edges

    def delay_scale(self, v, u) -> float:
        return self.tau.get((v, u), self.global_tau)

    def influenceability(self, u) -> float:
        return self.infl.get(u, 0.0)


def learn_time_params(log: ActionLog, graph: SocialGraph) -> TemporalParams:
    """Two-pass learning: mean delays per directed edge, then influenceability.

    Pass 1 averages t(u,a) - t(v,a) over every action in which the social
    edge (v, u) was traversed.  Pass 2 counts, per user, the fraction of
    performed actions having at least one parent within that learned window.
    """
    if not log.entries:
        raise PreconditionError("cannot learn temporal parameters from an empty log")
    sums = {}
    counts = {}
    total = 0
    total_n = 0
    for a in log.actions:
        active = {}
        for t, u in log.performances[a]:
            for v in graph.in_neighbors.get(u, ()):
                tv = active.get(v)
                if tv is not None and tv < t:
                    key = (v, u)
                    delta = t - tv
                    sums[key] = sums.get(key, 0) + delta
                    counts[key] = counts.get(key, 0) + 1
                    total += delta
                    total_n += 1
            active[u] = t
    tau = {key: sums[key] / counts[key] for key in sums}
    # With no observed propagation at all, any positive fallback is inert:
    # no DAG edge exists for the decay to apply to.
    global_tau = total / total_n if total_n else 1.0

    influenced = {}
    for a in log.actions:
        active = {}
        for t, u in log.performances[a]:
            for v in graph.in_neighbors.get(u, ()):
                tv = active.get(v)
                if tv is not None and tv < t and t - tv <= tau[(v, u)]:
                    influenced[u] = influenced.get(u, 0) + 1
                    break
            active[u] = t
    infl = {
        u: influenced.get(u, 0) / n for u, n in log.num_performed.items()
    }
    return TemporalParams(tau=tau, infl=infl, global_tau=global_tau)


@dataclass(frozen=True)
class TrainTestSplit:
    train: frozenset
    test: frozenset


def split_train_test(log: ActionLog) -> TrainTestSplit:
    """Rank actions by descending size (ties: id ascending); every fifth is test."""
    if not log.actions:
        raise PreconditionError("cannot split an empty log")
    ranked = sorted(log.actions, key=lambda a: (-len(log.performances[a]), a))
    test = frozenset(ranked[4::5])
    train = frozenset(a for a in log.actions if a not in test)
    return TrainTestSplit(train=train, test=test)
