"""Hidden-variable and quantum spin correlations for two qubits."""
from .inequalities import (
    InequalityReport,
    bell_original,
    bound_check,
    chsh,
    evaluate_all,
    generalized_bell,
)
from .lhv import (
    CorrelationEstimate,
    HiddenVariableModel,
    IntegrationConfig,
    JointOutcomeTable,
    LambdaConditionedFamily,
    MODEL_ZOO,
    bell_product_expectation,
    factorization_check,
    get_model,
    joint_outcome_table,
    lhv_correlation,
    singlet_basis_family,
    singlet_basis_mixture_expectation,
    singlet_qm_decomposition,
)
from .quantum import (
    RearrangementReport,
    coplanar_triple,
    qm_correlation,
    qm_correlation_density,
    qm_marginal,
    rearrangement_check,
)
from .spin import (
    DensityMatrix,
    Direction,
    TwoQubitState,
    density_from_pure,
    expectation,
    pauli_dot,
    product_state,
    singlet,
    tensor,
)

__version__ = "0.1.0"
