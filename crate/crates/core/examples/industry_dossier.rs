//! Builds the markdown dossier from the bundled datasets.

use market_concentration::report::dossier::{Bundle, Dossier};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dossier = Dossier::build(&Bundle::bundled(), 0)?;
    print!("{}", dossier.to_markdown());
    if dossier.has_violations() {
        std::process::exit(3);
    }
    Ok(())
}
