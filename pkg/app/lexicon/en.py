class LexiconEN:
    VALIDATION_OK = "scenario {name} ({scenario_id}) is valid"
    VALIDATION_FAILED = "scenario {name} ({scenario_id}) has {count} error(s)"
    ISSUE_LINE = "  {severity:<7} {code:<13} {where:<22} {message}"
    SLOT_LOADS_HEADER = "slot loads (arrivals per LP cycle):"
    SLOT_LOAD_LINE = "  slot {slot}: {load}"
    NO_LOADED_SLOTS = "  no occupied slots"

    ANALYTIC_HEADER = "analytic report for {name} ({scenario_id})"
    SLOT_LENGTH_LINE = "expected slot length {slot}, super-cycle {frame}, efficiency T_x/T_s {efficiency}"
    FRAME_LENGTH_LINE = "SyncCS expected frame length {frame} with {busy} busy slots per frame"
    ANALYSIS_OPTIONS_LINE = "SMsA forms: prefactor={prefactor} collision_rate={collision_rate}"
    SOLVER_WARNING = "warning: {message}"

    SIM_HEADER = "simulation of {name} ({scenario_id}): {replications} replication(s) x {horizon} slots"
    COLLISIONS_LINE = "collision events: {count}"
    FRAME_ESTIMATE_LINE = "mean super-cycle length {frame} CI {interval}"
    INSUFFICIENT_LINE = "devices with too few transmissions for reliable intervals: {devices}"
    LOG_EXPORTED = "event log written to {path}"

    COMPARE_HEADER = "comparison for {name} ({scenario_id}) with profile {profile}"
    COMPARE_PASSED = "overall: PASS"
    COMPARE_FAILED = "overall: FAIL ({count} mandatory quantities outside tolerance)"

    SWEEP_HEADER = "sweep of {name}: {points} grid point(s) over {axes}"
    SWEEP_POINT = "  point {index} {values}: {status}"
    SWEEP_DONE = "sweep results written to {path}"

    RESULTS_WRITTEN = "results written to {path}"
