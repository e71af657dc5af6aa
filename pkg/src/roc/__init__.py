"""Goal models, strategy-labelled Petri nets, As-Is/To-Be fragment alignment and case reuse."""

from .align import (AliasMap, AlignmentPair, AlignmentReport, Component, ComponentCatalog, align,
                    align_models, classify_gap, map_components, support_check)
from .cbr import Case, SimilarityScore, SimilarityWeights, adapt, compare, new_case, retrieve, \
    similarity, test_solution
from .dsl import ParseDiagnostic, Workspace, parse, parse_with_diagnostics, print_workspace
from .errors import RocError
from .goals import GoalGraph, GoalNode, Stakeholder, link_realization, trace, validate_goals
from .netsim import SoundnessReport, enabled, fire, reachable, soundness_lite
from .process import (Fragment, Place, ProcessModel, RefinementTree, Strategy, Transition,
                      extract_fragments, flatten, normalize_strategy, refine, validate_model)
from .repository import Repository

__version__ = "0.1.0"
