use catstate::budget::{budget_sweep, summary, write_csv};
use serde_json::{json, Value};

use crate::error::Result;
use crate::registry::{RunContext, Scenario};

pub struct Budget;

impl Scenario for Budget {
    fn name(&self) -> &'static str {
        "budget"
    }

    fn description(&self) -> &'static str {
        "predicted fidelity and per-source infidelity along an alpha, theta or xi sweep"
    }

    fn run(&self, ctx: &mut RunContext) -> Result<Value> {
        let params = ctx.config.params()?;
        let spec = ctx.config.spec()?;
        let axis = ctx.config.budget.axis;
        let grid = ctx.config.budget_grid()?;
        let rows = budget_sweep(&params, &spec, axis, &grid, ctx.config.cutoff)?;
        ctx.write_with("budget.csv", |w| write_csv(&rows, w))?;
        let summary = json!({
            "axis": axis,
            "points": grid.len(),
            "rows": rows.len(),
            "columns": summary(&rows),
            "table": "budget.csv",
        });
        ctx.write_json("budget.json", &summary)?;
        Ok(summary)
    }
}
