#include "kesten/rng.hpp"

namespace kesten {

Xoshiro256pp::Xoshiro256pp(const StreamKey& key) noexcept {
    // Chain the three coordinates through the mixer so nearby keys land far apart.
    std::uint64_t h = mix64(key.master_seed);
    h = mix64(h ^ (key.agent * 0xd1b54a32d192ed03ULL));
    h = mix64(h ^ (key.run * 0x8cb92ba72f3d8dd7ULL + 0x632be59bd9b4e019ULL));
    for (auto& word : s_) {
        h += 0x9e3779b97f4a7c15ULL;
        word = mix64(h);
    }
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) {
        s_[0] = 1;
    }
}

}  // namespace kesten
