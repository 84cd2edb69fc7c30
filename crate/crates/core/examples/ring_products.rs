//! Products of kernel elements stay in the kernel.

use deckforge::kernel_search::verify_kernel_element;
use deckforge::ring::parse_expression;
use deckforge::KernelElement;

fn main() -> deckforge::Result<()> {
    for expr in ["(II - L)^2", "(II - L) * (Claw - Tri)", "(Claw - Tri)^2", "(II - L)^3 * (Claw - Tri)"] {
        let x = parse_expression(expr)?;
        let k = KernelElement::from_graded(&x)?;
        let (v, n) = k.stratum();
        println!("{expr}: {} terms at (v={v}, n={n}), kernel: {}", x.len(), verify_kernel_element(&k)?);
    }
    println!("(II - L)^2 = {}", parse_expression("(II - L)^2")?);
    Ok(())
}
