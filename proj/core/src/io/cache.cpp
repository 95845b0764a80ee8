#include "ocq/io/cache.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

#include "ocq/error.hpp"
#include "ocq/io/digest.hpp"

namespace ocq::io {

namespace {

constexpr char kMagic[8] = {'O', 'C', 'Q', 'S', 'P', 'E', 'C', '1'};

class Writer {
public:
    template <class T>
    void put(const T& v) {
        const auto* p = reinterpret_cast<const char*>(&v);
        bytes.insert(bytes.end(), p, p + sizeof(T));
    }
    void put_raw(const void* data, std::size_t size) {
        const auto* p = static_cast<const char*>(data);
        bytes.insert(bytes.end(), p, p + size);
    }
    std::string bytes;
};

class Reader {
public:
    explicit Reader(std::string_view data) : data_(data) {}
    template <class T>
    bool get(T& v) {
        return get_raw(&v, sizeof(T));
    }
    bool get_raw(void* out, std::size_t size) {
        if (data_.size() - pos_ < size) return false;
        std::memcpy(out, data_.data() + pos_, size);
        pos_ += size;
        return true;
    }
    [[nodiscard]] bool done() const { return pos_ == data_.size(); }

private:
    std::string_view data_;
    std::size_t pos_ = 0;
};

}  // namespace

SpectrumCache::SpectrumCache(std::filesystem::path directory) : dir_(std::move(directory)) {}

std::filesystem::path SpectrumCache::default_directory() {
    if (const char* env = std::getenv(kCacheEnvVar); env && *env) return env;
    if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) return std::filesystem::path(xdg) / "ocq";
    if (const char* home = std::getenv("HOME"); home && *home) return std::filesystem::path(home) / ".cache" / "ocq";
    return std::filesystem::temp_directory_path() / "ocq-cache";
}

std::string SpectrumCache::key(const ImpurityPotential& potential, std::size_t modes, const SolverOptions& options,
                               std::string_view version) {
    std::ostringstream s;
    s << "version=" << version << ";kappa=" << format_double(potential.strength)
      << ";d=" << format_double(potential.position) << ";sigma=" << format_double(potential.width) << ";K=" << modes
      << ";coupling=" << to_string(options.coupling) << ";quadrature=" << options.quadrature_factor;
    return sha256_hex(s.str());
}

std::filesystem::path SpectrumCache::entry_path(const std::string& key) const { return dir_ / (key + ".spec"); }

void SpectrumCache::store(const std::string& key, const PerturbedSpectrum& spectrum) const {
    const auto K = static_cast<std::uint64_t>(spectrum.modes());
    Writer w;
    w.put_raw(kMagic, sizeof kMagic);
    w.put_raw(key.data(), key.size());
    w.put(K);
    w.put(static_cast<std::uint8_t>(spectrum.method));
    w.put(static_cast<std::uint8_t>(spectrum.coupling));
    w.put(spectrum.potential.strength);
    w.put(spectrum.potential.position);
    w.put(spectrum.potential.width);
    w.put(spectrum.effective_strength);
    w.put_raw(spectrum.energies.data(), K * sizeof(double));
    w.put_raw(spectrum.coupled.data(), K);
    w.put_raw(spectrum.overlaps.data(), K * K * sizeof(double));
    const std::string digest = sha256_hex(w.bytes);

    std::filesystem::create_directories(dir_);
    static std::atomic<unsigned> counter{0};
    std::ostringstream tmp_name;
    tmp_name << key << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id()) << '.' << counter++;
    const auto tmp = dir_ / tmp_name.str();
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(w.bytes.data(), static_cast<std::streamsize>(w.bytes.size()));
        out.write(digest.data(), static_cast<std::streamsize>(digest.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw NumericalError("spectrum cache: failed to write " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, entry_path(key));
}

std::optional<PerturbedSpectrum> SpectrumCache::load(const std::string& key) const {
    std::ifstream in(entry_path(key), std::ios::binary);
    if (!in) return std::nullopt;
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    constexpr std::size_t kDigestSize = 64;
    if (data.size() < kDigestSize) return std::nullopt;
    const std::string_view payload(data.data(), data.size() - kDigestSize);
    if (sha256_hex(payload) != std::string_view(data).substr(payload.size())) return std::nullopt;

    Reader r(payload);
    char magic[sizeof kMagic];
    std::string stored_key(key.size(), '\0');
    std::uint64_t K = 0;
    std::uint8_t method = 0, coupling = 0;
    PerturbedSpectrum s;
    if (!r.get_raw(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0) return std::nullopt;
    if (!r.get_raw(stored_key.data(), stored_key.size()) || stored_key != key) return std::nullopt;
    if (!r.get(K) || !r.get(method) || !r.get(coupling)) return std::nullopt;
    if (K == 0 || K > (1u << 16) || method > 1 || coupling > 1) return std::nullopt;
    s.method = static_cast<SolverMethod>(method);
    s.coupling = static_cast<CouplingScheme>(coupling);
    if (!r.get(s.potential.strength) || !r.get(s.potential.position) || !r.get(s.potential.width) ||
        !r.get(s.effective_strength)) {
        return std::nullopt;
    }
    const auto k = static_cast<Eigen::Index>(K);
    s.energies.resize(k);
    s.coupled.resize(K);
    s.overlaps.resize(k, k);
    if (!r.get_raw(s.energies.data(), K * sizeof(double)) || !r.get_raw(s.coupled.data(), K) ||
        !r.get_raw(s.overlaps.data(), K * K * sizeof(double)) || !r.done()) {
        return std::nullopt;
    }
    return s;
}

PerturbedSpectrum SpectrumCache::get_or_compute(const ImpurityPotential& potential, std::size_t modes,
                                                const SolverOptions& options, bool* hit) const {
    const std::string k = key(potential, modes, options);
    if (auto cached = load(k)) {
        if (hit) *hit = true;
        return std::move(*cached);
    }
    if (hit) *hit = false;
    PerturbedSpectrum s = diagonalize_perturbed(OscillatorBasis(modes), potential, options);
    store(k, s);
    return s;
}

}  // namespace ocq::io
