"""
Report schemas.

Every CLI report is a ``Report``: the ``RunConfig`` that produced it, a
deterministic ``payload``, and wall-clock ``timings`` kept outside the
payload so two runs of one config compare equal.
"""

from typing import Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, Field, model_validator

from relaxed_voronoi.config import DEFAULT_PAIR_SEED, DEFAULT_SEED, VALIDATION_LEVEL
from relaxed_voronoi.evaluation import DistortionReport, StretchReport


# =============================================================================
# CONFIG
# =============================================================================

class RunConfig(BaseModel):
    """Everything needed to reproduce a run."""
    subcommand: Literal["spr-tree", "m0e", "connected-m0e", "bench", "ddim"]
    input: Optional[str] = None
    gen: Optional[str] = None
    terminals: str = "leaves"
    ordering: str = "given"
    magnitude: Optional[str] = None
    root: int = 0
    seed: int = DEFAULT_SEED
    trials: int = Field(default=1, ge=1)
    pair_sample: int = Field(default=1, ge=1)
    pair_seed: int = DEFAULT_PAIR_SEED
    ddim: Optional[float] = Field(default=None, gt=0)
    estimate_ddim: bool = False
    c: Optional[float] = Field(default=None, gt=0)
    workers: int = Field(default=1, ge=1)
    sizes: List[int] = Field(default_factory=list)
    repeats: int = Field(default=1, ge=1)
    validation: str = VALIDATION_LEVEL

    @model_validator(mode="after")
    def _one_input(self) -> "RunConfig":
        if self.subcommand != "bench" and (self.input is None) == (self.gen is None):
            raise ValueError("exactly one of input and gen must be set")
        return self


# =============================================================================
# PAYLOADS
# =============================================================================

class MinorPayload(BaseModel):
    """Minor edges as [i, j, d_G(t_i, t_j)] with i < j in pi order."""
    edges: List[Tuple[int, int, float]]


class PartitionPayload(BaseModel):
    """Clusters in pi order plus the induced minor."""
    clusters: List[List[int]]
    minor: MinorPayload


class DistortionPayload(BaseModel):
    """Worst-case distortion of an induced minor."""
    max_distortion: float
    argmax_pair: Optional[Tuple[int, int]] = None

    @classmethod
    def from_report(cls, report: DistortionReport) -> "DistortionPayload":
        return cls(max_distortion=report.max_distortion, argmax_pair=report.argmax_pair)


class SprPayload(BaseModel):
    """Tree Steiner point removal result."""
    order: List[int]
    magnitude: float
    partition: PartitionPayload
    distortion: DistortionPayload
    bound: Optional[float] = None
    edge_touches: int
    root_in_first_cluster: bool


class PairStretchPayload(BaseModel):
    """Mean and variance of one pair's stretch over trials."""
    x: int
    y: int
    distance: float
    mean: float
    variance: float


class StretchPayload(BaseModel):
    """Expected-stretch estimate."""
    engine: str
    order: List[int]
    max_mean_stretch: float
    argmax_pair: Optional[Tuple[int, int]] = None
    trials: int
    seed: int
    pair_seed: Optional[int] = None
    skipped_zero_pairs: int = 0
    pairs: List[PairStretchPayload]
    retraction: Optional[List[int]] = None

    @classmethod
    def from_report(
        cls,
        engine: str,
        order: List[int],
        report: StretchReport,
        retraction: Optional[List[int]] = None,
    ) -> "StretchPayload":
        return cls(
            engine=engine,
            order=order,
            max_mean_stretch=report.max_mean_stretch,
            argmax_pair=report.argmax_pair,
            trials=report.trials,
            seed=report.seed,
            pair_seed=report.pair_seed,
            skipped_zero_pairs=report.skipped_zero_pairs,
            pairs=[PairStretchPayload(**vars(p)) for p in report.pairs],
            retraction=retraction,
        )


class BenchRow(BaseModel):
    """One size of a benchmark sweep; its wall times live in the report timings."""
    family: str
    n: int
    k: int
    edge_touches: int
    touch_ratio: float


class DdimPayload(BaseModel):
    """Doubling-dimension suggestion."""
    n: int
    estimate: float


# =============================================================================
# REPORT
# =============================================================================

Payload = Union[SprPayload, StretchPayload, DdimPayload, List[BenchRow]]


class Report(BaseModel):
    """A reproducible report: config, deterministic payload, timings."""
    config: RunConfig
    payload: Payload
    timings: Dict[str, float] = Field(default_factory=dict)
