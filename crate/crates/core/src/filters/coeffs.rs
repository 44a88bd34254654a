// @generated by tools/gen_filters.py; do not edit by hand.
//
// Filters are stored in pywt convention: `*_DEC_LO` is the analysis
// low-pass in convolution order, `*_REC_LO` the synthesis low-pass.

#![allow(clippy::excessive_precision, clippy::approx_constant)]

// haar
pub(crate) const HAAR_DEC_LO: [f64; 2] = [
    7.07106781186547573e-01,
    7.07106781186547573e-01,
];
pub(crate) const HAAR_REC_LO: [f64; 2] = [
    7.07106781186547573e-01,
    7.07106781186547573e-01,
];

// bior2.8
pub(crate) const BIOR2_8_DEC_LO: [f64; 18] = [
    0.00000000000000000e+00,
    1.51054305063044216e-03,
    -3.02108610126088431e-03,
    -1.29475118625466470e-02,
    2.89161098263541784e-02,
    5.29984818906909377e-02,
    -1.34913073607736050e-01,
    -1.63829183434090225e-01,
    4.62571440475916529e-01,
    9.51642121897178561e-01,
    4.62571440475916529e-01,
    -1.63829183434090225e-01,
    -1.34913073607736050e-01,
    5.29984818906909377e-02,
    2.89161098263541784e-02,
    -1.29475118625466470e-02,
    -3.02108610126088431e-03,
    1.51054305063044216e-03,
];
pub(crate) const BIOR2_8_REC_LO: [f64; 18] = [
    0.00000000000000000e+00,
    0.00000000000000000e+00,
    0.00000000000000000e+00,
    0.00000000000000000e+00,
    0.00000000000000000e+00,
    0.00000000000000000e+00,
    0.00000000000000000e+00,
    3.53553390593273786e-01,
    7.07106781186547573e-01,
    3.53553390593273786e-01,
    0.00000000000000000e+00,
    0.00000000000000000e+00,
    0.00000000000000000e+00,
    0.00000000000000000e+00,
    0.00000000000000000e+00,
    0.00000000000000000e+00,
    0.00000000000000000e+00,
    0.00000000000000000e+00,
];

// bior3.7
pub(crate) const BIOR3_7_DEC_LO: [f64; 16] = [
    3.02108610126088431e-03,
    -9.06325830378265293e-03,
    -1.68317654213106412e-02,
    7.46639850740190014e-02,
    3.13329787073628879e-02,
    -3.01159125922835003e-01,
    -2.64992409453454689e-02,
    9.51642121897178561e-01,
    9.51642121897178561e-01,
    -2.64992409453454689e-02,
    -3.01159125922835003e-01,
    3.13329787073628879e-02,
    7.46639850740190014e-02,
    -1.68317654213106412e-02,
    -9.06325830378265293e-03,
    3.02108610126088431e-03,
];
pub(crate) const BIOR3_7_REC_LO: [f64; 16] = [
    0.00000000000000000e+00,
    0.00000000000000000e+00,
    0.00000000000000000e+00,
    0.00000000000000000e+00,
    0.00000000000000000e+00,
    0.00000000000000000e+00,
    1.76776695296636893e-01,
    5.30330085889910596e-01,
    5.30330085889910596e-01,
    1.76776695296636893e-01,
    0.00000000000000000e+00,
    0.00000000000000000e+00,
    0.00000000000000000e+00,
    0.00000000000000000e+00,
    0.00000000000000000e+00,
    0.00000000000000000e+00,
];

// bior3.9
pub(crate) const BIOR3_9_DEC_LO: [f64; 20] = [
    -6.79744372783698905e-04,
    2.03923311835109682e-03,
    5.06031921961198113e-03,
    -2.06189126411055364e-02,
    -1.41127879301758442e-02,
    9.91347824942321598e-02,
    1.23001362694193147e-02,
    -3.20191968360778567e-01,
    2.05002271156988578e-03,
    9.42125700678206779e-01,
    9.42125700678206779e-01,
    2.05002271156988578e-03,
    -3.20191968360778567e-01,
    1.23001362694193147e-02,
    9.91347824942321598e-02,
    -1.41127879301758442e-02,
    -2.06189126411055364e-02,
    5.06031921961198113e-03,
    2.03923311835109682e-03,
    -6.79744372783698905e-04,
];
pub(crate) const BIOR3_9_REC_LO: [f64; 20] = [
    0.00000000000000000e+00,
    0.00000000000000000e+00,
    0.00000000000000000e+00,
    0.00000000000000000e+00,
    0.00000000000000000e+00,
    0.00000000000000000e+00,
    0.00000000000000000e+00,
    0.00000000000000000e+00,
    1.76776695296636893e-01,
    5.30330085889910596e-01,
    5.30330085889910596e-01,
    1.76776695296636893e-01,
    0.00000000000000000e+00,
    0.00000000000000000e+00,
    0.00000000000000000e+00,
    0.00000000000000000e+00,
    0.00000000000000000e+00,
    0.00000000000000000e+00,
    0.00000000000000000e+00,
    0.00000000000000000e+00,
];

// coif2
pub(crate) const COIF2_DEC_LO: [f64; 12] = [
    -7.20549445520346976e-04,
    -1.82320887091103230e-03,
    5.61143481936883428e-03,
    2.36801719468477702e-02,
    -5.94344186464310920e-02,
    -7.64885990782807612e-02,
    4.17005184423239084e-01,
    8.12723635449413506e-01,
    3.86110066822762887e-01,
    -6.73725547237255945e-02,
    -4.14649367868717769e-02,
    1.63873364632036410e-02,
];
pub(crate) const COIF2_REC_LO: [f64; 12] = [
    1.63873364632036410e-02,
    -4.14649367868717769e-02,
    -6.73725547237255945e-02,
    3.86110066822762887e-01,
    8.12723635449413506e-01,
    4.17005184423239084e-01,
    -7.64885990782807612e-02,
    -5.94344186464310920e-02,
    2.36801719468477702e-02,
    5.61143481936883428e-03,
    -1.82320887091103230e-03,
    -7.20549445520346976e-04,
];

// db4
pub(crate) const DB4_DEC_LO: [f64; 8] = [
    -1.05974017850690317e-02,
    3.28830116668851966e-02,
    3.08413818355607640e-02,
    -1.87034811719093086e-01,
    -2.79837694168598543e-02,
    6.30880767929858921e-01,
    7.14846570552915672e-01,
    2.30377813308896506e-01,
];
pub(crate) const DB4_REC_LO: [f64; 8] = [
    2.30377813308896506e-01,
    7.14846570552915672e-01,
    6.30880767929858921e-01,
    -2.79837694168598543e-02,
    -1.87034811719093086e-01,
    3.08413818355607640e-02,
    3.28830116668851966e-02,
    -1.05974017850690317e-02,
];

// db6
pub(crate) const DB6_DEC_LO: [f64; 12] = [
    -1.07730108530847959e-03,
    4.77725751094551076e-03,
    5.53842201161496126e-04,
    -3.15820393174860298e-02,
    2.75228655303057269e-02,
    9.75016055873230425e-02,
    -1.29766867567261940e-01,
    -2.26264693965439828e-01,
    3.15250351709197629e-01,
    7.51133908021095364e-01,
    4.94623890398453059e-01,
    1.11540743350109467e-01,
];
pub(crate) const DB6_REC_LO: [f64; 12] = [
    1.11540743350109467e-01,
    4.94623890398453059e-01,
    7.51133908021095364e-01,
    3.15250351709197629e-01,
    -2.26264693965439828e-01,
    -1.29766867567261940e-01,
    9.75016055873230425e-02,
    2.75228655303057269e-02,
    -3.15820393174860298e-02,
    5.53842201161496126e-04,
    4.77725751094551076e-03,
    -1.07730108530847959e-03,
];

// db8
pub(crate) const DB8_DEC_LO: [f64; 16] = [
    -1.17476784124769535e-04,
    6.75449406450569331e-04,
    -3.91740373376947050e-04,
    -4.87035299345157414e-03,
    8.74609404740577662e-03,
    1.39810279173982824e-02,
    -4.40882539307947546e-02,
    -1.73693010018075474e-02,
    1.28747426620478472e-01,
    4.72484573913282795e-04,
    -2.84015542961546907e-01,
    -1.58291052563493059e-02,
    5.85354683654206731e-01,
    6.75630736297289758e-01,
    3.12871590914299946e-01,
    5.44158422431040081e-02,
];
pub(crate) const DB8_REC_LO: [f64; 16] = [
    5.44158422431040081e-02,
    3.12871590914299946e-01,
    6.75630736297289758e-01,
    5.85354683654206731e-01,
    -1.58291052563493059e-02,
    -2.84015542961546907e-01,
    4.72484573913282795e-04,
    1.28747426620478472e-01,
    -1.73693010018075474e-02,
    -4.40882539307947546e-02,
    1.39810279173982824e-02,
    8.74609404740577662e-03,
    -4.87035299345157414e-03,
    -3.91740373376947050e-04,
    6.75449406450569331e-04,
    -1.17476784124769535e-04,
];

// sym4
pub(crate) const SYM4_DEC_LO: [f64; 8] = [
    -7.57657147895022115e-02,
    -2.96355276460024929e-02,
    4.97618667632775014e-01,
    8.03738751805132101e-01,
    2.97857795605306064e-01,
    -9.92195435766335260e-02,
    -1.26039672620313035e-02,
    3.22231006040514661e-02,
];
pub(crate) const SYM4_REC_LO: [f64; 8] = [
    3.22231006040514661e-02,
    -1.26039672620313035e-02,
    -9.92195435766335260e-02,
    2.97857795605306064e-01,
    8.03738751805132101e-01,
    4.97618667632775014e-01,
    -2.96355276460024929e-02,
    -7.57657147895022115e-02,
];

// sym7
pub(crate) const SYM7_DEC_LO: [f64; 14] = [
    2.68181456826014708e-03,
    -1.04738488867973803e-03,
    -1.26363034032405674e-02,
    3.05155131658778854e-02,
    6.78926935012205690e-02,
    -4.95528349370428292e-02,
    1.74412550868357080e-02,
    5.36101917090569202e-01,
    7.67764317004882901e-01,
    2.88629631750647875e-01,
    -1.40047240442933651e-01,
    -1.07808237703289719e-01,
    4.01024487152239553e-03,
    1.02681767084648167e-02,
];
pub(crate) const SYM7_REC_LO: [f64; 14] = [
    1.02681767084648167e-02,
    4.01024487152239553e-03,
    -1.07808237703289719e-01,
    -1.40047240442933651e-01,
    2.88629631750647875e-01,
    7.67764317004882901e-01,
    5.36101917090569202e-01,
    1.74412550868357080e-02,
    -4.95528349370428292e-02,
    6.78926935012205690e-02,
    3.05155131658778854e-02,
    -1.26363034032405674e-02,
    -1.04738488867973803e-03,
    2.68181456826014708e-03,
];

