"""Obvious strategy-proofness relative to a partition of agents, for
two-alternative committee rules: exhaustive verifiers, quota-game builders
and the decision procedures for anonymous committees."""

from .characterize import (
    Certificate,
    anonymous_committees,
    certify,
    decide_osp_anonymous,
    decide_osp_strong,
    generate_quota_committee,
    lemma2_conditions,
)
from .committee import (
    Committee,
    ScfTable,
    dual,
    dummies,
    emvr_evaluate,
    extract_committee,
    is_anonymous_rel,
    is_sp,
    is_winning,
    minimalize,
    quota_committee,
    strong_anonymity_quota,
)
from .core import (
    PX,
    PY,
    OrderedPartition,
    Partition,
    Preference,
    Verdict,
    coarsenings,
    is_coarser,
    prefers,
    top,
)
from .game import (
    Arena,
    TypeStrategyProfile,
    build_quota_game,
    figure1_game,
    is_in_game_class,
    play_from,
    prune,
    relabel,
    truth_telling_profile,
    validate,
)
from .verify import (
    earliest_departures,
    induces,
    is_obviously_dominant,
    is_weakly_dominant,
    is_weakly_dominant_brute,
    option_sets,
    osp_implements,
)

__all__ = [
    "anonymous_committees",
    "Arena",
    "build_quota_game",
    "Certificate",
    "certify",
    "coarsenings",
    "Committee",
    "decide_osp_anonymous",
    "decide_osp_strong",
    "dual",
    "dummies",
    "earliest_departures",
    "emvr_evaluate",
    "extract_committee",
    "figure1_game",
    "generate_quota_committee",
    "induces",
    "is_anonymous_rel",
    "is_coarser",
    "is_in_game_class",
    "is_obviously_dominant",
    "is_sp",
    "is_weakly_dominant",
    "is_weakly_dominant_brute",
    "is_winning",
    "lemma2_conditions",
    "minimalize",
    "option_sets",
    "OrderedPartition",
    "osp_implements",
    "Partition",
    "play_from",
    "Preference",
    "prefers",
    "prune",
    "PX",
    "PY",
    "quota_committee",
    "relabel",
    "ScfTable",
    "strong_anonymity_quota",
    "top",
    "truth_telling_profile",
    "TypeStrategyProfile",
    "validate",
    "Verdict",
]

__version__ = "0.1.0"
