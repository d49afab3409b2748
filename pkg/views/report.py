"""Plain-text lines printed on stdout by the command line"""
from controllers.match_engine import CompiledPattern
from models.automata import live_state_count
from models.records import MatchOutcome


def summary_line(compiled: CompiledPattern) -> str:
    """nfa=… dfa=… min_dfa=… sfa=… followed by the sizes without dead states"""
    sfa = compiled.nsfa or compiled.sfa
    parts = [
        f"nfa={compiled.nfa.state_count}",
        f"dfa={compiled.dfa.state_count}",
        f"min_dfa={compiled.min_dfa.state_count}",
        f"sfa={sfa.state_count if sfa else '-'}",
        f"live_dfa={live_state_count(compiled.dfa)}",
        f"live_min_dfa={live_state_count(compiled.min_dfa)}",
        f"live_sfa={sfa.live_state_count if sfa else '-'}",
    ]
    if compiled.nsfa is not None:
        parts.append("kind=n-sfa")
    return ' '.join(parts)


def timing_line(compiled: CompiledPattern) -> str:
    return (f"nfa_s={compiled.nfa_build_s:.6f} dfa_s={compiled.dfa_build_s:.6f} "
            f"min_dfa_s={compiled.min_build_s:.6f} sfa_s={compiled.sfa_build_s:.6f} "
            f"sfa_states_per_s={compiled.sfa_states_per_second:.0f}")


def verdict_line(outcome: MatchOutcome) -> str:
    return 'accept' if outcome.accepted else 'reject'


def outcome_line(outcome: MatchOutcome, input_bytes: int) -> str:
    """Machine-readable timing for one match"""
    finals = ','.join(str(q) for q in sorted(outcome.final_states))
    return (f"engine={outcome.engine.value} input_bytes={input_bytes} total_ns={outcome.timing.total_ns} "
            f"scan_ns={outcome.timing.scan_ns} reduce_ns={outcome.timing.reduce_ns} final_states={finals}")
