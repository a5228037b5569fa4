"""H-accuracy: confidence-penalized, class-prioritized, complexity-weighted accuracy."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    ComplexityAssignment,
    ConfusionMatrix,
    Dataset,
    Instance,
    LabelSet,
    PenaltySpec,
    PriorityVector,
    validate_dataset,
)
from .metrics import (  # noqa: E402
    HaParams,
    balanced_accuracy,
    confident_accuracy,
    h_accuracy,
    net_benefit,
    net_benefit_via_ha,
    practical_accuracy,
    prioritized_accuracy,
    regular_accuracy,
    risk_rates,
    standardized_net_benefit,
    youden_index,
)

__all__ = [
    "ComplexityAssignment", "ConfusionMatrix", "Dataset", "HaParams", "Instance", "LabelSet",
    "PenaltySpec", "PriorityVector", "balanced_accuracy", "confident_accuracy", "h_accuracy",
    "net_benefit", "net_benefit_via_ha", "practical_accuracy", "prioritized_accuracy",
    "regular_accuracy", "risk_rates", "standardized_net_benefit", "validate_dataset",
    "youden_index",
]
