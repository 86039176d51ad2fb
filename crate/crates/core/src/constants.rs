//! CODATA 2018 exact constants (SI).

/// Boltzmann constant (J/K).
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Elementary charge (C).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Avogadro constant (1/mol).
pub const AVOGADRO: f64 = 6.022_140_76e23;
/// Vacuum permittivity (F/m).
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

/// Thermal voltage kT/q at temperature `t` (V).
pub fn thermal_voltage(t: f64) -> f64 {
    BOLTZMANN * t / ELEMENTARY_CHARGE
}
