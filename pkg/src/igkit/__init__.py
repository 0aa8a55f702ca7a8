"""igkit: a workbench for grammars whose variables carry stacks of indices.

Subsystems: the grammar data model and one-step semantics (igkit.grammar),
budgeted derivation search (igkit.engine), language-preserving closure
constructions (igkit.closure, igkit.automata), linear/semilinear sets with an
exact bit-vector decision core and a grammar synthesizer (igkit.semilinear,
igkit.vector_automata), table-driven parallel rewriting systems (igkit.etol),
reversal-bounded counter machines (igkit.counters), and a batch CLI
(igkit.cli).
"""

from importlib import resources


def fixture_path(name: str):
    """Filesystem path of a bundled fixture file."""
    return resources.files(__name__).joinpath("fixtures", name)


def fixture_text(name: str) -> str:
    return fixture_path(name).read_text(encoding="utf-8")


__all__ = ["fixture_path", "fixture_text"]
__version__ = "0.1.0"
