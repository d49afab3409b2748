"""Pattern families used by the size studies, benchmarks and tests"""


def scalability_pattern(n: int) -> str:
    """([0-4]{n}[5-9]{n})*: minimal DFA 2n live states, D-SFA 4n²+2n-1"""
    return f"([0-4]{{{n}}}[5-9]{{{n}}})*"


def explosion_dfa_pattern(n: int) -> str:
    """[ap]*[al][alp]{n-2}: n+1 NFA states, minimal DFA 2^n states"""
    if n < 2:
        raise ValueError("the DFA explosion family starts at n = 2")
    return f"[ap]*[al][alp]{{{n - 2}}}"


def explosion_sfa_pattern(n: int) -> str:
    """(m|(t|c([mt]*c){n-2})[cmt])*: minimal DFA n live states, D-SFA n^n"""
    if n < 2:
        raise ValueError("the SFA explosion family starts at n = 2")
    return f"(m|(t|c([mt]*c){{{n - 2}}})[cmt])*"


def overhead_pattern() -> str:
    return "(([02468][13579]){5})*"


def subsequence_pattern(word: str) -> str:
    """.*(w1.*w2.* ... wk.*): inputs containing `word` as a subsequence"""
    return ".*(" + "".join(f"{ch}.*" for ch in word) + ")"


def stuck_state_pattern(n: int) -> str:
    """r_n|a*, whose SFA stays put on runs of 'a'"""
    return f"{scalability_pattern(n)}|a*"


def substring_pattern(pattern: str) -> str:
    """Wrap a pattern so whole-input matching finds it anywhere"""
    return f".*({pattern}).*"
