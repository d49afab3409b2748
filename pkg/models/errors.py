"""
Error types shared by the parser, the automaton builders and the controllers.
Every error carries the process exit code the command line reports for it.
"""
from typing import Optional


class SfaRegexError(Exception):
    """Base class for all matcher errors"""
    exit_code = 1


class RegexSyntaxError(SfaRegexError):
    """Malformed pattern text"""
    exit_code = 2

    def __init__(self, position: int, message: str):
        self.position = position
        self.message = message
        super().__init__(f"syntax error at position {position}: {message}")


class UnsupportedFeature(SfaRegexError):
    """Pattern uses a construct outside the supported grammar"""
    exit_code = 2

    def __init__(self, feature: str, position: Optional[int] = None):
        self.feature = feature
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"unsupported feature{where}: {feature}")


class CapacityExceeded(SfaRegexError):
    """A construction stage grew past its configured state cap"""
    exit_code = 3

    def __init__(self, stage: str, limit: int):
        self.stage = stage
        self.limit = limit
        super().__init__(f"{stage} construction exceeded the cap of {limit} states")


class DomainMismatch(SfaRegexError):
    """Two state mappings over different automata were composed"""

    def __init__(self, left: int, right: int):
        self.left = left
        self.right = right
        super().__init__(f"cannot compose mappings over {left} and {right} states")


class InvalidThreadCount(SfaRegexError):
    """Thread count below one"""
    exit_code = 2

    def __init__(self, threads: int):
        self.threads = threads
        super().__init__(f"thread count must be at least 1, got {threads}")


class InputError(SfaRegexError):
    """Input file or pattern list could not be read"""
    exit_code = 4


class GenerationError(SfaRegexError):
    """No accepted input text could be generated"""
    exit_code = 5


class EmptyLanguage(GenerationError):
    """The automaton accepts no word at all"""

    def __init__(self):
        super().__init__("the language is empty; no accepted word exists")


class NoLongWord(GenerationError):
    """The language is finite and every word is shorter than requested"""

    def __init__(self, longest: int, target: int):
        self.longest = longest
        self.target = target
        super().__init__(f"longest accepted word has {longest} bytes, {target} requested")
