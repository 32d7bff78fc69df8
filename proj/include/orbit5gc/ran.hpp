#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "orbit5gc/auth.hpp"
#include "orbit5gc/nas.hpp"
#include "orbit5gc/sim.hpp"
#include "orbit5gc/trace.hpp"

namespace orbit5gc {

enum class UeRegState { Idle, AuthWait, AcceptWait, Registered };
const char* ue_reg_state_name(UeRegState s);

struct UeSessionInfo {
    std::uint32_t session_id = 0;
    std::uint32_t ue_ip = 0;
    std::uint32_t tunnel_id = 0;
    std::uint8_t qos_class = 0;
};

// Simulated subscriber endpoint. Mirrors the core-side state machine but
// only advances on received acknowledgments, so its view always lags the
// AMF's. Message routing is delegated to the harness via SendFn.
class SimUe {
public:
    struct Config {
        TimeUs processing_us = 500;
        int retries = 0;  // per-message resends on response timeout
        TimeUs retry_timeout_us = 1'000'000;
    };

    struct Notification {
        enum class Kind {
            Registered,
            RegistrationRejected,
            SessionAccepted,
            SessionRejected,
            ReleaseCompleted,
        };
        Kind kind;
        std::string dn;
        std::uint8_t cause = 0;
        UeSessionInfo session;
    };

    using SendFn = std::function<void(const SimUe&, const nas::NasMessage&, bool initial)>;
    using NotifyFn = std::function<void(SimUe&, const Notification&)>;

    SimUe(Simulator& sim, Tracer& tracer, nas::Supi supi, std::vector<std::uint8_t> key,
          std::uint32_t gnb_id, std::uint32_t ue_ran_id, std::uint8_t slice_id, Config cfg);

    void set_send_fn(SendFn fn) { send_ = std::move(fn); }
    void set_notify_fn(NotifyFn fn) { notify_ = std::move(fn); }

    void start_registration();
    void start_session(const std::string& dn, std::uint8_t qos);
    void start_release(const std::string& dn);
    void start_deregister();

    void handle_downlink_nas(const nas::NasMessage& msg);

    const nas::Supi& supi() const { return supi_; }
    std::uint32_t gnb_id() const { return gnb_id_; }
    std::uint32_t ue_ran_id() const { return ue_ran_id_; }
    UeRegState reg_state() const { return reg_state_; }
    const std::optional<UeSessionInfo> session_for(const std::string& dn) const;
    const std::map<std::string, UeSessionInfo>& sessions() const { return sessions_; }

    // Per-exchange request/response latencies of the registration in
    // flight (request->auth challenge, response->accept), microseconds.
    const std::vector<TimeUs>& exchange_latencies() const { return exchanges_us_; }
    TimeUs registration_started_at() const { return reg_start_us_; }

private:
    struct Awaiting {
        std::uint64_t generation = 0;
        nas::NasMessage resend;
        bool initial = false;
        std::vector<nas::MessageType> expected;
        int retries_left = 0;
    };

    void send_now(const nas::NasMessage& msg, bool initial);
    void await_response(const nas::NasMessage& sent, bool initial,
                        std::vector<nas::MessageType> expected);
    void arm_retry_timer();
    void trace_state(const char* state);

    Simulator& sim_;
    Tracer& tracer_;
    nas::Supi supi_;
    std::vector<std::uint8_t> key_;
    std::uint32_t gnb_id_;
    std::uint32_t ue_ran_id_;
    std::uint8_t slice_id_;
    Config cfg_;
    SendFn send_;
    NotifyFn notify_;

    UeRegState reg_state_ = UeRegState::Idle;
    std::optional<Awaiting> awaiting_;
    std::uint64_t next_generation_ = 1;
    std::string pending_dn_;  // session/release procedure in flight
    std::map<std::string, UeSessionInfo> sessions_;
    std::vector<TimeUs> exchanges_us_;
    TimeUs reg_start_us_ = 0;
    TimeUs last_request_sent_us_ = 0;
};

// Base station relay entry: ue_ran_id assignment and UE lookup. The
// harness owns message forwarding; onboard gNBs (co-located with the
// core, per the regenerative-payload deployment) bypass the satellite
// link entirely.
struct SimGnb {
    std::uint32_t id = 0;
    bool onboard = false;
    std::uint32_t next_ran_id = 1;
    std::map<std::uint32_t, std::size_t> ue_by_ran_id;  // ran id -> roster index

    std::uint32_t attach(std::size_t ue_index) {
        const std::uint32_t ran_id = next_ran_id++;
        ue_by_ran_id[ran_id] = ue_index;
        return ran_id;
    }
};

}  // namespace orbit5gc
