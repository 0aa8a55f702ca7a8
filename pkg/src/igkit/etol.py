"""Table-driven parallel rewriting systems and their conversion to
stack-indexed grammars.

A system rewrites every symbol occurrence of the current word simultaneously,
using productions from one table per step. In active normal form the
rewritable symbols are exactly the non-terminals, which is what the
conversion relies on: the table sequence of a parallel derivation is guessed
in reverse onto an index stack, then replayed one occurrence at a time.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from .engine import Budget, BudgetOverflow
from .grammar import (
    GrammarError,
    IndexedGrammar,
    ParseError,
    Production,
    fresh_name,
    strip_comment,
)


class NotInANF(GrammarError):
    """Raised when a conversion requires active normal form."""


@dataclass(frozen=True)
class Table:
    name: str
    rules: tuple[tuple[str, tuple[str, ...]], ...]

    def options(self, symbol: str) -> tuple[tuple[str, ...], ...]:
        return tuple(rhs for sym, rhs in self.rules if sym == symbol)


@dataclass(frozen=True)
class EtolSystem:
    alphabet: tuple[str, ...]  # the full working alphabet
    terminals: tuple[str, ...]
    axiom: str
    tables: tuple[Table, ...]
    name: str = field(default="etol", compare=False)

    def active_symbols(self) -> frozenset[str]:
        """Symbols some table can turn into something other than themselves."""
        return frozenset(
            sym for t in self.tables for sym, rhs in t.rules if rhs != (sym,)
        )


def validate_etol(sys: EtolSystem) -> list[str]:
    problems = []
    v = set(sys.alphabet)
    if not set(sys.terminals) <= v:
        problems.append("terminals must be part of the alphabet")
    if sys.axiom not in v:
        problems.append(f"axiom {sys.axiom!r} not in the alphabet")
    if not sys.tables:
        problems.append("a system needs at least one table")
    for t in sys.tables:
        covered = {sym for sym, _ in t.rules}
        for sym, rhs in t.rules:
            if sym not in v:
                problems.append(f"table {t.name}: rule for unknown symbol {sym!r}")
            for s in rhs:
                if s not in v:
                    problems.append(f"table {t.name}: rhs symbol {s!r} unknown")
        missing = v - covered
        if missing:
            problems.append(
                f"table {t.name}: no production for {sorted(missing)} (parallel totality)"
            )
    return problems


def check_anf(sys: EtolSystem) -> list[str]:
    """Active-normal-form violations: every terminal must be inert, every
    non-terminal rewritable."""
    active = sys.active_symbols()
    problems = []
    for t in sys.terminals:
        if t in active:
            problems.append(f"terminal {t!r} is active")
    for s in sys.alphabet:
        if s not in set(sys.terminals) and s not in active:
            problems.append(f"non-terminal {s!r} is inactive")
    return problems


# ---------------------------------------------------------------------------
# semantics


def etol_step(sys: EtolSystem, word, table: int | str, choices) -> tuple[str, ...]:
    """One parallel step: choices[i] is the option index (within the table's
    productions for that symbol) applied to occurrence i."""
    t = sys.tables[table] if isinstance(table, int) else next(
        tb for tb in sys.tables if tb.name == table
    )
    word = tuple(word)
    if len(choices) != len(word):
        raise GrammarError("need exactly one choice per occurrence")
    out: list[str] = []
    for sym, choice in zip(word, choices):
        opts = t.options(sym)
        if not opts:
            raise GrammarError(f"table {t.name} has no production for {sym!r}")
        if not 0 <= choice < len(opts):
            raise GrammarError(f"choice {choice} out of range for {sym!r} in {t.name}")
        out.extend(opts[choice])
    return tuple(out)


def _successor_words(sys: EtolSystem, word, inactive: frozenset[str]):
    for t in sys.tables:
        option_lists = []
        ok = True
        for sym in word:
            if sym in inactive:
                option_lists.append(((sym,),))
                continue
            opts = t.options(sym)
            if not opts:
                ok = False
                break
            option_lists.append(opts)
        if not ok:
            continue
        for combo in itertools.product(*option_lists):
            yield tuple(itertools.chain.from_iterable(combo))


@dataclass(frozen=True)
class EtolEnumeration:
    words: tuple[tuple[str, ...], ...]
    exhausted: bool
    words_seen: int

    def rendered(self) -> tuple[str, ...]:
        return tuple("".join(w) for w in self.words)


def etol_enumerate(sys: EtolSystem, max_len: int, budget: Budget) -> EtolEnumeration:
    """Terminal words of length <= max_len reachable within the budget;
    budget.max_width caps the number of active occurrences per word."""
    active = sys.active_symbols()
    inactive = frozenset(sys.alphabet) - active
    terminals = set(sys.terminals)

    def pruned(word) -> bool:
        n_inactive = sum(1 for s in word if s in inactive)
        if n_inactive > max_len:
            return True
        if budget.max_width is not None:
            if len(word) - n_inactive > budget.max_width:
                return True
        return False

    start = (sys.axiom,)
    seen = {start}
    frontier = [start]
    found = set()
    steps = 0
    while frontier and steps < budget.max_steps:
        nxt = []
        for word in frontier:
            for w2 in _successor_words(sys, word, inactive):
                if w2 in seen or pruned(w2):
                    continue
                seen.add(w2)
                if len(seen) > budget.hard_cap:
                    raise BudgetOverflow("parallel frontier exceeded the hard cap")
                nxt.append(w2)
        frontier = nxt
        steps += 1
    for w in seen:
        if len(w) <= max_len and all(s in terminals for s in w):
            found.add(w)
    return EtolEnumeration(
        words=tuple(sorted(found, key=lambda w: (len(w), w))),
        exhausted=not frontier,
        words_seen=len(seen),
    )


def etol_min_index(sys: EtolSystem, w, budget: Budget) -> Optional[int]:
    """Smallest cap on simultaneous active occurrences under which some
    parallel derivation of w exists within the budget; None when not found."""
    w = tuple(w)
    active = sys.active_symbols()
    inactive = frozenset(sys.alphabet) - active
    top = budget.max_width if budget.max_width is not None else max(len(w), 1) + 2
    for cap in range(1, top + 1):
        start = (sys.axiom,)
        seen = {start}
        frontier = [start]
        steps = 0
        while frontier and steps < budget.max_steps:
            nxt = []
            for word in frontier:
                for w2 in _successor_words(sys, word, inactive):
                    if w2 in seen:
                        continue
                    n_inactive = sum(1 for s in w2 if s in inactive)
                    if n_inactive > len(w) or len(w2) - n_inactive > cap:
                        continue
                    seen.add(w2)
                    if w2 == w:
                        return cap
                    nxt.append(w2)
            frontier = nxt
            steps += 1
    return None


# ---------------------------------------------------------------------------
# conversion


def etol_to_indexed(sys: EtolSystem) -> IndexedGrammar:
    """Stack-indexed grammar for the same language (system must be in active
    normal form). A fresh start variable pushes an arbitrary table sequence,
    reversed, then hands the stack to the axiom; each consume production
    replays one table entry on one occurrence."""
    problems = validate_etol(sys)
    if problems:
        raise GrammarError("invalid system: " + "; ".join(problems))
    anf = check_anf(sys)
    if anf:
        raise NotInANF("; ".join(anf))
    nonterminals = tuple(s for s in sys.alphabet if s not in set(sys.terminals))
    start = fresh_name("S", sys.alphabet)
    taken = set(sys.alphabet) | {start}
    idx_names = []
    for t in sys.tables:
        nm = t.name
        while nm in taken:
            nm += "#t"
        taken.add(nm)
        idx_names.append(nm)
    prods: list[Production] = []
    for nm in idx_names:
        prods.append(Production(start, (start,), push_index=nm))
    prods.append(Production(start, (sys.axiom,)))
    for t, nm in zip(sys.tables, idx_names):
        for sym, rhs in t.rules:
            if sym in set(sys.terminals):
                continue
            prods.append(Production(sym, rhs, lhs_index=nm))
    return IndexedGrammar(
        variables=(start,) + nonterminals,
        terminals=sys.terminals,
        indices=tuple(idx_names),
        productions=tuple(prods),
        start=start,
        name=f"idx({sys.name})",
    )


# ---------------------------------------------------------------------------
# text format


def parse_etol(text: str) -> EtolSystem:
    """Line format: `etol <name>`, `axiom:`, `terminals:`, optional `strict:`,
    then `table <name>:` blocks of `rule: B -> ν` lines. Without `strict:`,
    symbols a table does not mention default to the identity rule."""
    name = None
    axiom = None
    terminals: Optional[tuple[str, ...]] = None
    strict = False
    tables: list[tuple[str, list]] = []
    order: list[str] = []

    def note(sym):
        if sym not in order:
            order.append(sym)

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = strip_comment(raw).strip()
        if not line:
            continue
        if name is None:
            parts = line.split()
            if parts[0] != "etol" or len(parts) != 2:
                raise ParseError("expected header `etol <name>`", line_no)
            name = parts[1]
            continue
        key, sep, rest = line.partition(":")
        if not sep:
            raise ParseError(f"expected `key: value`, got {line!r}", line_no)
        key = key.strip()
        rest = rest.strip()
        if key == "axiom":
            axiom = rest
            note(axiom)
        elif key == "terminals":
            terminals = tuple(t.strip() for t in rest.split(",") if t.strip())
            for t in terminals:
                note(t)
        elif key == "strict":
            strict = True
        elif key.startswith("table"):
            parts = key.split()
            if len(parts) != 2:
                raise ParseError("expected `table <name>:`", line_no)
            tables.append((parts[1], []))
        elif key == "rule":
            if not tables:
                raise ParseError("rule outside a table block", line_no)
            lhs, arrow, rhs = rest.partition("->")
            if not arrow:
                raise ParseError("rule needs `->`", line_no)
            sym = lhs.strip()
            toks = rhs.split()
            if toks == ["_"]:
                toks = []
            note(sym)
            for s in toks:
                note(s)
            tables[-1][1].append((sym, tuple(toks)))
        else:
            raise ParseError(f"unknown section {key!r}", line_no)
    if name is None:
        raise ParseError("empty system file", 1)
    if axiom is None or terminals is None:
        raise ParseError("missing `axiom:` or `terminals:`", 1)
    if not tables:
        raise ParseError("missing `table <name>:` block", 1)
    filled = []
    for tname, rules in tables:
        covered = {sym for sym, _ in rules}
        if not strict:
            rules = list(rules) + [(s, (s,)) for s in order if s not in covered]
        filled.append(Table(tname, tuple(rules)))
    return EtolSystem(
        alphabet=tuple(order),
        terminals=terminals,
        axiom=axiom,
        tables=tuple(filled),
        name=name,
    )


def serialize_etol(sys: EtolSystem) -> str:
    lines = [f"etol {sys.name}", f"axiom: {sys.axiom}", "terminals: " + ", ".join(sys.terminals), "strict:"]
    for t in sys.tables:
        lines.append(f"table {t.name}:")
        for sym, rhs in t.rules:
            lines.append(f"rule: {sym} -> {' '.join(rhs) if rhs else '_'}")
    return "\n".join(lines) + "\n"
