# Utils package: statistics, seeding, batched trial execution and artifact writers
from .helpers import wilson_interval, fit_exponential, trial_rng, stream_id, parse_kv, parse_int_list
from .batching import BatchConfig, TrialProgress, run_batches
from .artifacts import RunWriter, read_manifest, dumps, csv_text

__all__ = [
    'wilson_interval', 'fit_exponential', 'trial_rng', 'stream_id', 'parse_kv', 'parse_int_list',
    'BatchConfig', 'TrialProgress', 'run_batches',
    'RunWriter', 'read_manifest', 'dumps', 'csv_text',
]
