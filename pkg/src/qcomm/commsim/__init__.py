"""Classical two-party protocols: problems, transcripts, protocols and reductions."""
from .problems import (
    ALICE, BOB, DisjInstance, PjInstance, PjValue, SkInstance, all_pj, all_sk,
    disj_eval, dump_instance, instance_from_json, instance_to_json, load_instance,
    pad_to_even, pj_eval, pj_path, random_pj, random_sk, sk_eval, width,
)
from .protocols import (
    ProtocolResult, iterated_log, log_star, nw_budget, pj_det_protocol, pj_nw_protocol,
    prefix_schedule, sample_size, sk_protocol_right_start, sk_protocol_wrong_start,
)
from .transcript import BitReader, Message, PublicCoins, Transcript
from .reduction import DemoReport, Reduction, classical_round_reduction_demo, sk_to_disj
from .experiment import CSV_COLUMNS, PROTOCOLS, ExperimentReport, experiment, write_csv
