#!/usr/bin/env python3
"""
Loss-family ablations: every combination of the bound, sensitivity and
distribution families with and without monotone weights, the supervised
baseline, and the with/without sensitivity comparison.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import FrozenSet, List, Optional, Sequence

from models import ConstraintConfig, Dataset, LossComponent, MetricsReport
from utils.dataset_service import label_column
from utils.errors import DivergenceError, InvalidConfigError
from utils.evaluation_service import evaluate_scores
from utils.training_service import run_pipeline

logger = logging.getLogger(__name__)

# the mode loss travels with the bound family
FAMILIES = {
    'bound': frozenset({LossComponent.BOUND, LossComponent.MODE}),
    'sensitivity': frozenset({LossComponent.SENSITIVITY}),
    'distribution': frozenset({LossComponent.DISTRIBUTION}),
}

COMBINATIONS = (
    ('Distribution', ('distribution',)),
    ('Bound', ('bound',)),
    ('Sensitivity', ('sensitivity',)),
    ('Bound+Distribution', ('bound', 'distribution')),
    ('Distribution+Sensitivity', ('distribution', 'sensitivity')),
    ('Bound+Sensitivity', ('bound', 'sensitivity')),
    ('All', ('bound', 'distribution', 'sensitivity')),
)


@dataclass(frozen=True)
class AblationCase:
    number: int
    label: str
    monotone: bool = True
    components: FrozenSet[LossComponent] = frozenset()
    supervised: bool = False

    @property
    def name(self) -> str:
        return f"{self.number}: {self.label}"


def ablation_cases() -> List[AblationCase]:
    """Case 2 is the supervised baseline, 3-9 non-monotone, 10-16 monotone"""
    cases = [AblationCase(2, 'Supervised NN', monotone=False, supervised=True)]
    number = 3
    for monotone in (False, True):
        for label, families in COMBINATIONS:
            components = frozenset().union(*(FAMILIES[f] for f in families))
            prefix = 'Monotone' if monotone else 'Non-monotone'
            cases.append(AblationCase(number, f"{prefix} {label}", monotone, components))
            number += 1
    return cases


def sensitivity_cases() -> List[AblationCase]:
    everything = frozenset(LossComponent)
    return [
        AblationCase(1, 'Without sensitivity', components=everything - FAMILIES['sensitivity']),
        AblationCase(2, 'With sensitivity', components=everything),
    ]


class AblationService:
    def __init__(self, data: Dataset, constraints: ConstraintConfig, truth: Optional[str] = None,
                 epochs: Optional[int] = None, workers: int = 1):
        """
        data: raw rows (features plus any ground-truth column)
        truth: ground-truth column, used for rank correlation, RMSE and the supervised case
        """
        if workers < 1:
            raise InvalidConfigError(f"workers must be >= 1, got {workers}")
        self.data = data
        self.constraints = constraints
        self.truth = label_column(data, truth) if truth is not None else None
        self.epochs = epochs
        self.workers = workers

    def _run_case(self, case: AblationCase, seed: int) -> Optional[MetricsReport]:
        cfg = self.constraints.train.with_overrides(seed=seed, epochs=self.epochs, monotone=case.monotone)
        enabled = case.components & self.constraints.enabled_components()
        if case.supervised and self.truth is None:
            logger.warning(f"Skipping case {case.name}: no ground-truth column")
            return None
        if not case.supervised and not enabled:
            logger.warning(f"Skipping case {case.name}: none of its losses are configured")
            return None

        logger.info(f"Running case {case.name} (seed {seed})")
        try:
            run = run_pipeline(self.data, self.constraints, cfg, labels=self.truth,
                               supervised=case.supervised, enabled=enabled)
        except DivergenceError as e:
            logger.warning(f"Case {case.name} diverged at step {e.step}")
            return MetricsReport(case=case.name, seed=seed, diverged_at_step=e.step)

        test = self.data.take(run.test_rows)
        scores = run.model.score(test)
        truth = self.truth[run.test_rows] if self.truth is not None else None
        return evaluate_scores(scores, test.select(self.constraints.feature_names), self.constraints,
                               truth, case=case.name, seed=seed)

    def run(self, cases: Sequence[AblationCase], seeds: Sequence[int]) -> List[MetricsReport]:
        """One report per (seed, case), ordered by seed then case number"""
        jobs = [(case, seed) for seed in seeds for case in cases]
        if self.workers == 1:
            results = [self._run_case(case, seed) for case, seed in jobs]
        else:
            with ThreadPoolExecutor(max_workers=self.workers) as executor:
                results = list(executor.map(lambda job: self._run_case(*job), jobs))
        return [report for report in results if report is not None]


def run_ablation(data: Dataset, constraints: ConstraintConfig, seeds: Sequence[int],
                 truth: Optional[str] = None, study: str = 'losses', epochs: Optional[int] = None,
                 workers: int = 1) -> List[MetricsReport]:
    if study == 'losses':
        cases = ablation_cases()
    elif study == 'sensitivity':
        cases = sensitivity_cases()
    else:
        raise InvalidConfigError(f"Unknown ablation study '{study}'")
    if not len(seeds):
        raise InvalidConfigError("At least one seed is required")
    service = AblationService(data, constraints, truth, epochs, workers)
    return service.run(cases, [int(seed) for seed in seeds])
