import logging
from typing import Optional

import pandas as pd

from models.sfa import Sfa

logger = logging.getLogger(__name__)


def mapping_frame(sfa: Sfa, max_states: Optional[int] = None) -> pd.DataFrame:
    """One column per SFA state f<s>, one row per source state q holding f(q)"""
    count = sfa.state_count if max_states is None else min(max_states, sfa.state_count)
    columns = {}
    for state in range(count):
        mapping = sfa.mapping(state)
        cells = ['{' + ','.join(str(t) for t in sorted(mapping.targets(q))) + '}'
                 for q in range(mapping.domain_size)]
        cells.append('yes' if state in sfa.finals else 'no')
        columns[f"f{state}"] = cells
    index = [str(q) for q in range(sfa.origin.state_count)] + ['final']
    return pd.DataFrame(columns, index=index)


def dump_mappings(sfa: Sfa, max_states: Optional[int] = None) -> str:
    """Tabular text dump of every state's mapping"""
    if max_states is not None and sfa.state_count > max_states:
        logger.warning(f"Dumping the first {max_states} of {sfa.state_count} mappings")
    return mapping_frame(sfa, max_states).to_string()
