"""Exception types shared across the package.

Each operation that can reject its input raises one of these instead of a
bare ValueError so callers (service layer, CLI) can map failures to stable
error codes.
"""


class RclError(Exception):
    """Base class for all domain errors."""

    code = "error"


class ScenarioError(RclError):
    """A scenario document is malformed or internally inconsistent."""

    code = "bad_scenario"


class InvalidBudget(RclError):
    """Crash-fault budget does not admit a majority quorum (t >= n/2)."""

    code = "invalid_budget"


class NoImmuneQuorum(RclError):
    """No quorum size is both large enough to intersect and small enough
    to stay live; happens exactly when n <= 3s."""

    code = "no_immune_quorum"


class NoEvidence(RclError):
    """A bait behavior was requested but the plan holds no conflicting
    pre-signed pair for any other coalition member."""

    code = "no_evidence"


class PreconditionFailed(RclError):
    """A budget translation was asked outside its valid region."""

    code = "precondition_failed"


class NotApplicable(RclError):
    """No baiter count can defuse the plan within the coalition size."""

    code = "not_applicable"


class ConstraintUnsatisfiable(RclError):
    """The scheduler could not serve every delivery deadline.

    Unreachable under the residue-slot discipline; kept so a future policy
    that bypasses pre-scheduling fails loudly instead of silently dropping
    a message.
    """

    code = "constraint_unsatisfiable"


class InvalidTrace(RclError):
    """A trace violates the schedule constraints it claims to satisfy."""

    code = "invalid_trace"


class ReplayDivergence(RclError):
    """A re-executed trace did not reproduce the recorded run bit for bit."""

    code = "replay_divergence"


class CapExceeded(RclError):
    """A sweep request exceeds the configured cell cap and --force is absent."""

    code = "cap_exceeded"
