use std::io::Write;

use lerpgan_core::gan::TrainMetrics;

pub const CSV_HEADER: &str = "step,d_loss,g_loss,d_acc_real,d_acc_fake";

pub fn write_csv(mut w: impl Write, metrics: &TrainMetrics) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for s in &metrics.steps {
        writeln!(
            w,
            "{},{},{},{},{}",
            s.step, s.d_loss, s.g_loss, s.d_acc_real, s.d_acc_fake
        )?;
    }
    Ok(())
}
