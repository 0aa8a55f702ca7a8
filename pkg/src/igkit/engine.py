"""Bounded exploration of the derivation relation.

Search-based language enumeration, membership, index measurement and
uncontrolled-width refutation. Index stacks are unbounded in general, so
every operation takes a Budget; verdicts are relative to the budget caps and
each result records whether the budgeted space was swept completely.

The hot path (one-step expansion of a sentential form) runs through
igkit.kernel, which picks the compiled kernel when it is available.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field, replace
from typing import Optional

from . import kernel
from .grammar import (
    CONSUME,
    PLAIN,
    PUSH,
    SPECIAL,
    Derivation,
    GrammarError,
    IndexedGrammar,
    SententialForm,
    Terminal,
    Var,
    apply_production,
    start_form,
)

PROVEN = "proven"
REFUTED = "refuted"
UNKNOWN = "unknown"

Word = tuple[str, ...]


class BudgetOverflow(Exception):
    """The internal frontier outgrew the configured hard cap."""


class NotAMember(Exception):
    """Raised by operations whose precondition is membership of the word."""

    def __init__(self, message: str, exhausted: bool):
        super().__init__(message)
        self.exhausted = exhausted


@dataclass(frozen=True)
class Budget:
    """Search bounds. max_steps (derivation length) is always required so the
    explored space is finite; the remaining caps default to unbounded."""

    max_steps: int
    max_width: Optional[int] = None
    max_stack: Optional[int] = None
    max_yield: Optional[int] = None
    hard_cap: int = 1_000_000

    def __post_init__(self):
        for name in ("max_steps", "max_width", "max_stack", "max_yield", "hard_cap"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ValueError(f"{name} must be >= 0")

    def active_caps(self) -> tuple[str, ...]:
        out = ["max_steps"]
        for name in ("max_width", "max_stack", "max_yield"):
            if getattr(self, name) is not None:
                out.append(name)
        return tuple(out)


@dataclass
class Verdict:
    kind: str
    witness: Optional[Derivation] = None
    info: dict = field(default_factory=dict)

    @property
    def is_proven(self) -> bool:
        return self.kind == PROVEN

    @property
    def is_refuted(self) -> bool:
        return self.kind == REFUTED

    @property
    def is_unknown(self) -> bool:
        return self.kind == UNKNOWN


@dataclass(frozen=True)
class EnumerationResult:
    words: tuple[Word, ...]
    exhausted: bool
    active_caps: tuple[str, ...]
    forms_seen: int

    def rendered(self) -> tuple[str, ...]:
        return tuple("".join(w) for w in self.words)


# ---------------------------------------------------------------------------
# grammar compilation for the kernel


class CompiledGrammar:
    """Integer tables consumed by the expansion kernel.

    Encoded forms are tuples of ints: -(tid+1) for terminal tid, and
    stack_id * nv + var_id for a variable occurrence. Stacks are interned in
    an append-only cons pool; id 0 is the empty stack.
    """

    _KIND = {PLAIN: 0, PUSH: 1, CONSUME: 2}

    def __init__(self, g: IndexedGrammar):
        self.g = g
        self.var_names = g.variables
        self.term_names = g.terminals
        self.idx_names = g.indices
        self.var_id = {v: i for i, v in enumerate(g.variables)}
        self.term_id = {t: i for i, t in enumerate(g.terminals)}
        self.idx_id = {f: i for i, f in enumerate(g.indices)}
        self.nv = max(1, len(g.variables))
        by_var: list[list[int]] = [[] for _ in range(self.nv)]
        prods = []
        for pid, p in enumerate(g.productions):
            if p.kind == PUSH:
                row = (1, -1, (), self.var_id[p.rhs[0]], self.idx_id[p.push_index], 1, 0)
            else:
                rhs = tuple(
                    self.var_id[s] if s in self.var_id else -(self.term_id[s] + 1)
                    for s in p.rhs
                )
                nvars = sum(1 for c in rhs if c >= 0)
                lhs_idx = -1 if p.lhs_index is None else self.idx_id[p.lhs_index]
                row = (self._KIND[p.kind], lhs_idx, rhs, -1, -1, nvars, len(rhs) - nvars)
            prods.append(row)
            by_var[self.var_id[p.lhs_var]].append(pid)
        self.prods = tuple(prods)
        self.by_var = tuple(tuple(pids) for pids in by_var)
        self.pool_top = [-1]
        self.pool_rest = [-1]
        self.pool_depth = [0]
        self.intern: dict[tuple[int, int], int] = {}

    # -- encoding ----------------------------------------------------------

    def intern_stack(self, stack: tuple[str, ...]) -> int:
        sid = 0
        for sym in reversed(stack):
            key = (self.idx_id[sym], sid)
            nxt = self.intern.get(key)
            if nxt is None:
                nxt = len(self.pool_top)
                self.pool_top.append(key[0])
                self.pool_rest.append(sid)
                self.pool_depth.append(self.pool_depth[sid] + 1)
                self.intern[key] = nxt
            sid = nxt
        return sid

    def stack_tuple(self, sid: int) -> tuple[str, ...]:
        out = []
        while sid != 0:
            out.append(self.idx_names[self.pool_top[sid]])
            sid = self.pool_rest[sid]
        return tuple(out)

    def encode_form(self, form: SententialForm) -> tuple[int, ...]:
        items = []
        for it in form.items:
            if isinstance(it, Terminal):
                items.append(-(self.term_id[it.symbol] + 1))
            else:
                items.append(self.intern_stack(it.stack) * self.nv + self.var_id[it.symbol])
        return tuple(items)

    def decode_form(self, enc: tuple[int, ...]) -> SententialForm:
        items: list = []
        for x in enc:
            if x < 0:
                items.append(Terminal(self.term_names[-x - 1]))
            else:
                items.append(Var(self.var_names[x % self.nv], self.stack_tuple(x // self.nv)))
        return SententialForm(tuple(items))

    def encode_word(self, w: Word) -> tuple[int, ...]:
        try:
            return tuple(-(self.term_id[s] + 1) for s in w)
        except KeyError as exc:
            raise GrammarError(f"letter {exc.args[0]!r} is not a terminal of {self.g.name}")

    def start(self) -> tuple[int, ...]:
        return (self.var_id[self.g.start],)

    def expand(self, form, budget: Budget, *, max_terms: int = -1, skeleton: bool = False):
        return kernel.expand(
            form, self.by_var, self.prods, self.nv,
            self.pool_top, self.pool_rest, self.pool_depth, self.intern,
            -1 if budget.max_width is None else budget.max_width,
            -1 if budget.max_stack is None else budget.max_stack,
            max_terms, 1 if skeleton else 0,
        )


def _is_terminal_enc(form: tuple[int, ...]) -> bool:
    return all(x < 0 for x in form)


def _rebuild(c: CompiledGrammar, parents: dict, last) -> Derivation:
    chain = []
    node = last
    while parents[node] is not None:
        parent, pid, pos = parents[node]
        chain.append((node, pid, pos))
        node = parent
    chain.reverse()
    forms = [c.decode_form(node)]
    steps = []
    for enc, pid, pos in chain:
        forms.append(c.decode_form(enc))
        steps.append((pid, pos))
    return Derivation(tuple(forms), tuple(steps))


# ---------------------------------------------------------------------------
# enumeration


def enumerate_language(g: IndexedGrammar, max_len: int, budget: Budget) -> EnumerationResult:
    """Words of L(g) of length <= max_len reachable within the budget, in
    length-lexicographic order. `exhausted` is True when the budgeted space
    was swept completely, making the list exact under the active caps."""
    c = CompiledGrammar(g)
    max_terms = max_len if budget.max_yield is None else min(max_len, budget.max_yield)
    start = c.start()
    visited = {start}
    frontier = [start]
    words: set[tuple[int, ...]] = set()
    steps = 0
    while frontier and steps < budget.max_steps:
        nxt = []
        for form in frontier:
            for _, _, f2 in c.expand(form, budget, max_terms=max_terms):
                if f2 in visited:
                    continue
                visited.add(f2)
                if _is_terminal_enc(f2):
                    words.add(f2)
                else:
                    nxt.append(f2)
        if len(visited) > budget.hard_cap:
            raise BudgetOverflow(f"frontier exceeded hard cap {budget.hard_cap}")
        frontier = nxt
        steps += 1
    decoded = sorted(
        (tuple(c.term_names[-x - 1] for x in w) for w in words if len(w) <= max_len),
        key=lambda w: (len(w), w),
    )
    return EnumerationResult(
        words=tuple(decoded),
        exhausted=not frontier,
        active_caps=budget.active_caps(),
        forms_seen=len(visited),
    )


# ---------------------------------------------------------------------------
# membership


def _yield_blocks(form: tuple[int, ...]) -> tuple[list[tuple[int, ...]], int]:
    blocks = []
    cur: list[int] = []
    nvars = 0
    for x in form:
        if x < 0:
            cur.append(x)
        else:
            blocks.append(tuple(cur))
            cur = []
            nvars += 1
    blocks.append(tuple(cur))
    return blocks, nvars


def _can_yield(form: tuple[int, ...], target: tuple[int, ...]) -> bool:
    """Necessary condition for `form` to derive exactly `target`: the fixed
    terminal blocks embed into the target, in order, anchored at both ends."""
    blocks, nvars = _yield_blocks(form)
    if nvars == 0:
        return blocks[0] == target
    total = sum(len(b) for b in blocks)
    if total > len(target):
        return False
    lead, trail = blocks[0], blocks[-1]
    if target[: len(lead)] != lead:
        return False
    limit = len(target) - len(trail)
    if limit < len(lead) or target[limit:] != trail:
        return False
    pos = len(lead)
    for mid in blocks[1:-1]:
        if not mid:
            continue
        n = len(mid)
        while pos + n <= limit and target[pos: pos + n] != mid:
            pos += 1
        if pos + n > limit:
            return False
        pos += n
    return True


def membership(g: IndexedGrammar, w: Word, budget: Budget, caps_exact: bool = False) -> Verdict:
    """Search for a derivation of w. Refuted is only claimed when the budgeted
    space is exhausted and the caller asserts (caps_exact) that the budget's
    width/stack caps cover every derivation of words up to |w|."""
    c = CompiledGrammar(g)
    target = c.encode_word(w)
    start = c.start()
    parents: dict = {start: None}
    frontier = [start]
    steps = 0
    exhausted = False
    while frontier and steps < budget.max_steps:
        nxt = []
        for form in frontier:
            for pos, pid, f2 in c.expand(form, budget, max_terms=len(target)):
                if f2 in parents:
                    continue
                parents[f2] = (form, pid, pos)
                if _is_terminal_enc(f2):
                    if f2 == target:
                        d = _rebuild(c, parents, f2)
                        return Verdict(PROVEN, d, {"exhausted": False, "forms": len(parents)})
                    continue
                if not _can_yield(f2, target):
                    continue
                nxt.append(f2)
        if len(parents) > budget.hard_cap:
            raise BudgetOverflow(f"frontier exceeded hard cap {budget.hard_cap}")
        frontier = nxt
        steps += 1
    exhausted = not frontier
    kind = REFUTED if (exhausted and caps_exact) else UNKNOWN
    return Verdict(kind, None, {"exhausted": exhausted, "forms": len(parents)})


def min_index(
    g: IndexedGrammar, w: Word, budget: Budget, caps_exact: bool = False
) -> Optional[tuple[int, Derivation]]:
    """Smallest k such that some derivation of w within the budget has index k,
    with the witness. None when the budget was exhausted without a proof;
    NotAMember when the (caps_exact) search refutes membership."""
    full = membership(g, w, budget, caps_exact)
    if full.is_refuted:
        raise NotAMember(f"{''.join(w)!r} is not generated", exhausted=True)
    if full.is_unknown:
        return None
    best_k = full.witness.index()
    best_wit = full.witness
    for k in range(1, best_k):
        v = membership(g, w, replace(budget, max_width=k))
        if v.is_proven:
            return (k, v.witness)
    return (best_k, best_wit)


def special_count_min(g: IndexedGrammar, w: Word, budget: Budget) -> tuple[int, Derivation]:
    """Minimum number of special-production applications over all derivations
    of w found within the budget."""
    c = CompiledGrammar(g)
    target = c.encode_word(w)
    specials = frozenset(
        pid for pid, p in enumerate(g.productions) if g.classify(p) == SPECIAL
    )
    start = c.start()
    parents: dict = {(start, 0): None}
    frontier = [(start, 0)]
    best: Optional[int] = None
    best_state = None
    steps = 0
    while frontier and steps < budget.max_steps:
        nxt = []
        for form, nspec in frontier:
            for pos, pid, f2 in c.expand(form, budget, max_terms=len(target)):
                n2 = nspec + (1 if pid in specials else 0)
                if best is not None and n2 >= best:
                    continue
                state = (f2, n2)
                if state in parents:
                    continue
                parents[state] = ((form, nspec), pid, pos)
                if _is_terminal_enc(f2):
                    if f2 == target:
                        best = n2
                        best_state = state
                    continue
                if not _can_yield(f2, target):
                    continue
                nxt.append(state)
        if len(parents) > budget.hard_cap:
            raise BudgetOverflow(f"frontier exceeded hard cap {budget.hard_cap}")
        frontier = nxt
        steps += 1
    if best is None:
        raise NotAMember(f"{''.join(w)!r} not derived within budget", exhausted=not frontier)
    chain = []
    node = best_state
    while parents[node] is not None:
        parent, pid, pos = parents[node]
        chain.append((node[0], pid, pos))
        node = parent
    chain.reverse()
    forms = [c.decode_form(node[0])]
    steps_out = []
    for enc, pid, pos in chain:
        forms.append(c.decode_form(enc))
        steps_out.append((pid, pos))
    return best, Derivation(tuple(forms), tuple(steps_out))


# ---------------------------------------------------------------------------
# uncontrolled-width checking


def check_uncontrolled(g: IndexedGrammar, k: int, budget: Budget) -> Verdict:
    """Refuted with a witness when a successful derivation contains a form
    wider than k; Proven when the whole budgeted space was swept without one.

    The search runs on the terminal-erased quotient of the form space (the
    variable/stack skeleton): widths and completability only depend on the
    skeleton, which keeps the space finite for many grammars whose concrete
    form space is not.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    c = CompiledGrammar(g)
    # Any form on a successful derivation that exceeds k is preceded by a
    # first offender of width <= k + (largest rhs width jump), so exploring
    # candidates up to that cap loses no refutation. The caller's own
    # max_width is ignored: it would mask exactly the forms we look for.
    max_jump = max((row[5] - 1 for row in c.prods if row[0] != 1), default=0)
    base_budget = replace(budget, max_width=None)
    phase1_budget = replace(budget, max_width=k + max(0, max_jump))

    def skeleton_path(parent_map, last):
        chain = []
        node = last
        while parent_map[node] is not None:
            parent, pid, pos = parent_map[node]
            chain.append((pid, pos))
            node = parent
        chain.reverse()
        return chain

    start = c.start()
    parents: dict = {start: None}
    heap: list[tuple[int, int, int, tuple[int, ...]]] = [(-1, 0, 0, start)]
    seq = 1
    truncated = False
    refute_incomplete = False
    dead: set = set()  # skeletons whose budgeted closure provably never finishes
    while heap:
        _, _, depth, form = heapq.heappop(heap)
        if depth >= budget.max_steps:
            truncated = True
            continue
        for pos, pid, f2 in c.expand(form, phase1_budget, skeleton=True):
            if f2 in parents:
                continue
            parents[f2] = (form, pid, pos)
            if len(parents) > budget.hard_cap:
                return Verdict(UNKNOWN, None, {"reason": "hard cap"})
            if len(f2) > k and f2 not in dead:
                found, p2_parents, p2_trunc = _skeleton_reach_empty(c, f2, base_budget)
                if found:
                    moves = skeleton_path(parents, f2) + skeleton_path(p2_parents, ())
                    witness = _lift_skeleton(g, moves)
                    return Verdict(
                        REFUTED, witness,
                        {"exhausted": False, "width": witness.index(),
                         "caps": budget.active_caps()},
                    )
                if p2_trunc:
                    refute_incomplete = True
                else:
                    # the whole budgeted closure was swept without finishing,
                    # so everything in it is equally hopeless
                    dead.update(p2_parents)
            if f2:
                heapq.heappush(heap, (-len(f2), seq, depth + 1, f2))
                seq += 1
    if truncated or refute_incomplete:
        return Verdict(UNKNOWN, None, {"exhausted": False, "caps": budget.active_caps()})
    return Verdict(PROVEN, None, {"exhausted": True, "caps": budget.active_caps()})


def _skeleton_reach_empty(c: CompiledGrammar, origin, budget: Budget):
    parents: dict = {origin: None}
    frontier = [origin]
    steps = 0
    truncated = False
    while frontier and steps < budget.max_steps:
        nxt = []
        for form in frontier:
            for pos, pid, f2 in c.expand(form, budget, skeleton=True):
                if f2 in parents:
                    continue
                parents[f2] = (form, pid, pos)
                if len(parents) > budget.hard_cap:
                    return False, parents, True
                if not f2:
                    return True, parents, False
                nxt.append(f2)
        frontier = nxt
        steps += 1
    truncated = bool(frontier)
    return False, parents, truncated


def _lift_skeleton(g: IndexedGrammar, moves: list[tuple[int, int]]) -> Derivation:
    """Replay skeleton moves (production id, variable-occurrence ordinal) on
    concrete forms, reinstating emitted terminals."""
    form = start_form(g)
    forms = [form]
    steps = []
    for pid, vpos in moves:
        item_pos = form.var_positions()[vpos]
        form = apply_production(g, form, item_pos, g.productions[pid])
        forms.append(form)
        steps.append((pid, item_pos))
    return Derivation(tuple(forms), tuple(steps))
