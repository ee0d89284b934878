//! Size a statistical fault-injection campaign for several fault-list sizes
//! and confidence levels.

use fmeda_uq::sampling::{sample_size, DEFAULT_PROPORTION};
use fmeda_uq::ConfidenceLevel;

fn main() -> Result<(), fmeda_uq::Error> {
    let populations = [1_000u64, 10_000, 100_000, 1_000_000, 1_000_000_000];
    let margins = [0.05, 0.01, 0.005];

    for level in ConfidenceLevel::ALL {
        println!("confidence {level} (t = {})", level.cutoff());
        print!("{:>14}", "N \\ e");
        for e in margins {
            print!("{e:>10}");
        }
        println!();
        for n in populations {
            print!("{n:>14}");
            for e in margins {
                print!("{:>10}", sample_size(n, e, level, DEFAULT_PROPORTION)?.sample_size);
            }
            println!();
        }
        println!();
    }

    // a prior estimate of the coverage below one half shrinks the campaign
    for p in [0.5, 0.9, 0.99] {
        let plan = sample_size(100_000, 0.01, ConfidenceLevel::P95, p)?;
        println!("p = {p:<5} n = {}", plan.sample_size);
    }
    Ok(())
}
