#pragma once

// Type A curve parameters generated by tools/gen_typea_params.py.
// Curve y^2 = x^3 + x over F_q, q = h*r - 1, q = 3 mod 4, r prime.

namespace hab::abe::detail {

struct TypeAParams {
  int level;
  const char* q_hex;
  const char* r_hex;
  const char* h_hex;
};

inline constexpr TypeAParams kTypeAParams[] = {
    {80,
        "ca9bb5acacb46d72d43693e2e99a85ed8fc2703f8acce3ba4a5d100250cc3909"
        "7f784b20e04d5693399075d229910dab51e8b680646d9cba6db260b38cca4e5b",
        "cf8469cac8a2fa3cf7f2cc4ae2997ef61a8df64f",
        "f9f1b08edd672837e24ab1d0cd493fd370b8164b42c16113c824afd2ce96838f"
        "5ccc68157e993c1c022a10e4"},
    {112,
        "a26d3fca60f4f0f664cb5f67a24180e7a394594d27aa9f043c334ee034d15447"
        "e0788f1d0446689a215968a69e12947ade65d1a711bfc7188c0f4b3d00fc4ddc"
        "b648c5d60cd15f901b44adced9bc682a295a343c40cb41dabeea5e0ab714e987"
        "e85b37c03db55b976c5b4edc1bdeb600c51bcce5afba2c7681271a6a8213205f",
        "a6c0dbe38531b40c265e25449e7660ee6aff940bb19819763faa564d",
        "f95b988941a50fa5c91e2963d3e61c65a9c6c7abe00ffb09a58a2d6d277d6b04"
        "7ac3e706cf143092996f9b951e3363288dd01c16b254b4534b5ec4f503ea561d"
        "31573a19c827f52ca46220a8a2a63b3d309b42d3dd679e1d02941b797ac95290"
        "d9be91e0"},
    {128,
        "92f2c5c5c170c7e43b9cd1f74fdd50ba5cf57a78e687a6a5927b65e995f4716b"
        "7071f494fcaa62d6bc154ac36ab2564b1fce26cafce43ab42c40e3fed3ce2ca9"
        "40dd16573b97f74790dd7d841b5ffaa57a6772a9895f751ca9e1fc5cc47e4db4"
        "50cc9e8d4744477c8e3ed179022543adbd0af1e7832f0536e8b40e6d18d04782"
        "78fa5a9779441d89602a8de4695b92988606d2b42f8cc46c883fcbfd51eb0a6b"
        "8d8e93eed8a883e2c92def91dcc8c8b4b6b9f8d11b97593c84c331dcef748d5b",
        "b999df826fec9e31c4bf87c298ad747d7da058d4523041deabd03aec34f7216d",
        "caafa9f6275f7ece3a477c0bd27492d4c97849f757521fc2393268bfd3821ff1"
        "dc64b86f679390fc52ebe8b9498bad5a9851eb748f0730272321df1c0743b24b"
        "ba6dabd313426b3e90eeb15df6b48471ba7cfd44691da930cc0765674616cec7"
        "06136a8d76a29b7cb9bc19d9faa4c4e3e3dbd454b667c01a993033385b0a901a"
        "d380358b55fe83cbc0f3ce997ae56a7ba60be48915d7f2c10cdf144b4dfd854c"},
};

}  // namespace hab::abe::detail
