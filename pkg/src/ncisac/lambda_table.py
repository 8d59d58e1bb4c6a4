"""Reference regularization weights per SNR for the two occupancy scenarios.

Values are per transform bin (see :mod:`ncisac.estimators`) and were selected
by the same K-fold procedure as :mod:`ncisac.tuning` on the default
parameter set, for SNR 0..10 dB in 1 dB steps. Lookups outside that span clamp
to the nearest tabulated SNR.
"""

from __future__ import annotations

import numpy as np

from ncisac.spectrum import Axis

TABLE_SNR_DB = np.arange(0, 11)

# scenario -> axis -> weights for TABLE_SNR_DB
LAMBDA_TABLE = {
    "s1": {
        Axis.RANGE: (5401, 5601, 5001, 4601, 5401, 5201, 5001, 5601, 5601, 5601, 5201),
        Axis.VELOCITY: (2.16, 1.56, 1.54, 1.08, 1.2, 1.12, 0.74, 0.68, 1.16, 1.7, 1.5),
    },
    "s2": {
        Axis.RANGE: (2501, 3501, 4501, 3001, 5001, 4001, 4801, 5101, 5201, 5601, 5101),
        Axis.VELOCITY: (1.32, 1.70, 1.44, 1.28, 0.92, 1.20, 1.10, 1.46, 1.70, 1.56, 1.54),
    },
}


def table_lambda(scenario: str, axis: Axis, snr_db: float) -> float:
    """Weight for the tabulated SNR nearest ``snr_db``; unknown scenarios use ``s1``."""
    row = LAMBDA_TABLE.get(scenario, LAMBDA_TABLE["s1"])[axis]
    idx = int(np.argmin(np.abs(TABLE_SNR_DB - snr_db)))
    return float(row[idx])
