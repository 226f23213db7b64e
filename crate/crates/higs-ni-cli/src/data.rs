//! Bundled example data: the nanopositioner model used throughout the
//! documentation and its two reference scenarios.

use higs_ni::higs::HigsParams;
use higs_ni::lti::StateSpace;

use crate::json::StateSpaceJson;
use crate::CmdError;

pub const MEMS_MODEL_JSON: &str = include_str!("../data/mems_model.json");
pub const MEMS_FREE_RESPONSE_JSON: &str = include_str!("../data/mems_free_response.json");
pub const MEMS_STEP_DISTURBANCE_JSON: &str = include_str!("../data/mems_step_disturbance.json");
pub const NON_NI_EXAMPLE_JSON: &str = include_str!("../data/non_ni_example.json");

/// The bundled second-order nanopositioner model.
pub fn mems_model() -> Result<StateSpace, CmdError> {
    let json: StateSpaceJson = serde_json::from_str(MEMS_MODEL_JSON)
        .map_err(|e| CmdError::Data(format!("bundled model: {e}")))?;
    json.to_state_space()
}

/// The element tuning used by the bundled scenarios.
pub fn mems_params() -> HigsParams {
    HigsParams::new(0.4939, 1.1705e4).expect("static parameters")
}
