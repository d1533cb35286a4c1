//! Moment table of the Fock weight compared with the factorial closed form.

use fockdual::moments::{fock_oracle, MomentTable, MultiIndex};
use fockdual::weights::make_fock;

fn main() -> fockdual::Result<()> {
    let phi = make_fock(2)?;
    let table = MomentTable::build(&phi, 4)?;
    println!("{:>8} {:>16} {:>16} {:>10}", "alpha", "c_alpha", "pi^n alpha!", "rel err");
    for alpha in MultiIndex::all_up_to(2, 4) {
        let got = table.get(&alpha)?;
        let (exact, _) = fock_oracle(&alpha);
        println!("{:>8} {:>16.10} {exact:>16.10} {:>10.2e}", alpha.to_string(), got.value, (got.value / exact - 1.0).abs());
    }
    table.write_csv(std::io::stdout())?;
    Ok(())
}
