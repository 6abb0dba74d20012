//! Prints the CSV of one figure: `cargo run --example figure_csv -- 3a`.

use fogran::figures::{figure, FigureId};

fn main() -> fogran::Result<()> {
    let id: FigureId = std::env::args().nth(1).unwrap_or_else(|| "2".into()).parse()?;
    print!("{}", figure(id)?.to_csv());
    Ok(())
}
