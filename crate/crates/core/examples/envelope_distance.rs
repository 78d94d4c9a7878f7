//! Distance from points to the envelope of two medial circles, with the
//! boundary piece (arc or tangent line) that realizes it.

use medispline::envelope::EnvelopeSegment;
use medispline::geometry::{MedialPoint, Point2};

fn main() -> medispline::error::Result<()> {
    let seg = EnvelopeSegment::new(MedialPoint::new(0.0, 0.0, 1.0), MedialPoint::new(4.0, 0.0, 0.5))?;
    let (a1, a2) = seg.angles().expect("two external tangents");
    println!("cone half-angles {a1:.4} + {a2:.4} = {:.4}", a1 + a2);
    if let Some((l12, l34)) = seg.tangent_lines() {
        println!("tangent lines: n=({:+.4}, {:+.4}) c={:+.4} and n=({:+.4}, {:+.4}) c={:+.4}",
            l12.normal.x, l12.normal.y, l12.offset, l34.normal.x, l34.normal.y, l34.offset);
    }

    for p in [
        Point2::new(-3.0, 0.5),
        Point2::new(6.0, -1.0),
        Point2::new(2.0, 3.0),
        Point2::new(2.0, -3.0),
        Point2::new(1.0, 0.2),
    ] {
        let d = seg.distance(p);
        println!(
            "p=({:+.1}, {:+.1})  {:<16} signed {:+.5}  footpoint ({:+.4}, {:+.4})",
            p.x,
            p.y,
            format!("{:?}", d.case),
            d.signed,
            d.footpoint.x,
            d.footpoint.y
        );
    }

    let g = seg.gradient(Point2::new(2.0, 3.0));
    println!("gradient wrt (x1, y1, r1, x2, y2, r2): {:+.4?}", g.value);

    let nested = EnvelopeSegment::new(MedialPoint::new(0.0, 0.0, 2.0), MedialPoint::new(0.5, 0.0, 1.0))?;
    println!("nested circles degenerate: {}", nested.is_degenerate());
    Ok(())
}
