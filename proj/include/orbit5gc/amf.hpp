#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "orbit5gc/auth.hpp"
#include "orbit5gc/nas.hpp"
#include "orbit5gc/ngap.hpp"
#include "orbit5gc/sim.hpp"
#include "orbit5gc/smf.hpp"
#include "orbit5gc/trace.hpp"

namespace orbit5gc {

enum class AmfUeState { Deregistered, AuthPending, Registered };
const char* amf_ue_state_name(AmfUeState s);

struct SecurityContext {
    std::uint32_t key_id = 0;
    std::uint32_t seq = 0;  // challenge sequence counter, persists across re-registrations
    std::array<std::uint8_t, auth::kNonceBytes> nonce{};
};

struct UeContext {
    nas::Supi supi;
    AmfUeState state = AmfUeState::Deregistered;
    SecurityContext sec;
    std::uint32_t gnb_id = 0;
    std::uint32_t ue_ran_id = 0;
    std::set<std::uint32_t> session_ids;
    TimeUs registered_at = 0;
    std::uint8_t slice_id = 0;
    bool complete = false;
};

// Documented serialized-size model for context_table_stats, mirrored in
// docs/resource-model.md: supi 15 + state 1 + key_id 4 + seq 4 + nonce 16
// + gnb_id 4 + ue_ran_id 4 + registered_at 8 + slice 1 + session_count 2.
constexpr std::size_t kUeContextBaseBytes = 59;
constexpr std::size_t kSessionRefBytes = 4;

struct ContextStats {
    std::size_t active_ues = 0;
    std::size_t registered = 0;
    std::size_t bytes_estimate = 0;
};

// Access and mobility management: NAS termination, registration and
// authentication state machines, session-request relay to the SMF.
// Single-threaded; owns its context table.
class Amf {
public:
    struct Config {
        TimeUs auth_pending_timeout_us = 6'000'000;  // T3560-like
        TimeUs processing_us = 500;                  // per-message turnaround
    };

    // Invoked when a downlink NAS message leaves the AMF (after the
    // processing delay); the harness routes it to the right gNB.
    using DownlinkSender = std::function<void(const ngap::NgapEnvelope&, nas::MessageType)>;
    using CompletionHook = std::function<void(const nas::Supi&)>;

    Amf(Simulator& sim, Tracer& tracer, Smf& smf, Config cfg, std::uint64_t seed);

    void set_downlink_sender(DownlinkSender s) { send_downlink_ = std::move(s); }
    void set_completion_hook(CompletionHook h) { on_complete_ = std::move(h); }

    void add_subscriber(const nas::Supi& supi, std::vector<std::uint8_t> key);

    void handle_uplink(const ngap::NgapEnvelope& env);

    ContextStats context_table_stats() const;
    const UeContext* find_context(const nas::Supi& supi) const;
    std::size_t context_count() const { return contexts_.size(); }

private:
    void on_registration_request(const ngap::NgapEnvelope& env, const nas::NasMessage& msg);
    void on_auth_response(const nas::Supi& supi, const nas::NasMessage& msg);
    void on_registration_complete(const nas::Supi& supi);
    void on_session_request(const nas::Supi& supi, const nas::NasMessage& msg);
    void on_session_release(const nas::Supi& supi, const nas::NasMessage& msg);
    void on_deregistration(const nas::Supi& supi);

    void start_authentication(UeContext& ctx);
    void remove_context(const nas::Supi& supi);
    void send_nas(const UeContext& ctx, nas::NasMessage msg, ngap::Procedure proc);
    void trace_state(const nas::Supi& supi, AmfUeState state);
    void trace_error(const char* reason, const std::string& detail);
    std::optional<nas::Supi> supi_for(const ngap::NgapEnvelope& env) const;

    Simulator& sim_;
    Tracer& tracer_;
    Smf& smf_;
    Config cfg_;
    std::mt19937_64 rng_;
    DownlinkSender send_downlink_;
    CompletionHook on_complete_;
    std::map<std::string, std::vector<std::uint8_t>> subscribers_;  // supi digits -> preshared key
    std::map<std::string, UeContext> contexts_;                     // one per supi
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::string> ngap_assoc_;  // (gnb, ran id) -> supi
    std::map<std::string, std::uint32_t> last_seq_;
};

}  // namespace orbit5gc
