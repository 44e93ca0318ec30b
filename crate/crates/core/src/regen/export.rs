use std::io::Write;

use super::estimate::EmpiricalConstants;
use super::model::SplitChainModel;
use super::split::RegenerationRecord;

/// Writes `index,state,bell,block_id` rows.
pub fn write_trajectory_csv<M: SplitChainModel, W: Write>(
    model: &M,
    record: &RegenerationRecord<M::State>,
    mut out: W,
) -> std::io::Result<()> {
    writeln!(out, "index,state,bell,block_id")?;
    for (i, ((x, bell), id)) in record
        .states
        .iter()
        .zip(&record.bells)
        .zip(record.block_ids())
        .enumerate()
    {
        writeln!(out, "{i},{},{},{id}", model.projection(x), u8::from(*bell))?;
    }
    Ok(())
}

pub fn constants_json(c: &EmpiricalConstants) -> serde_json::Value {
    serde_json::to_value(c).expect("plain data serializes")
}
