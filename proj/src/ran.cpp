#include "orbit5gc/ran.hpp"

#include <algorithm>

namespace orbit5gc {

const char* ue_reg_state_name(UeRegState s) {
    switch (s) {
        case UeRegState::Idle: return "Idle";
        case UeRegState::AuthWait: return "AuthWait";
        case UeRegState::AcceptWait: return "AcceptWait";
        case UeRegState::Registered: return "Registered";
    }
    return "?";
}

SimUe::SimUe(Simulator& sim, Tracer& tracer, nas::Supi supi, std::vector<std::uint8_t> key,
             std::uint32_t gnb_id, std::uint32_t ue_ran_id, std::uint8_t slice_id, Config cfg)
    : sim_(sim),
      tracer_(tracer),
      supi_(std::move(supi)),
      key_(std::move(key)),
      gnb_id_(gnb_id),
      ue_ran_id_(ue_ran_id),
      slice_id_(slice_id),
      cfg_(cfg) {}

const std::optional<UeSessionInfo> SimUe::session_for(const std::string& dn) const {
    auto it = sessions_.find(dn);
    if (it == sessions_.end()) return std::nullopt;
    return it->second;
}

void SimUe::start_registration() {
    reg_state_ = UeRegState::AuthWait;
    reg_start_us_ = sim_.now();
    exchanges_us_.clear();
    auto msg = nas::make_registration_request(supi_, slice_id_ ? std::optional(slice_id_) : std::nullopt);
    send_now(msg, true);
    await_response(msg, true,
                   {nas::MessageType::AuthenticationRequest, nas::MessageType::RegistrationReject});
}

void SimUe::start_session(const std::string& dn, std::uint8_t qos) {
    if (reg_state_ != UeRegState::Registered) {
        // ordering violation caught locally, nothing goes on the air
        if (notify_)
            notify_(*this, {Notification::Kind::SessionRejected, dn, nas::cause::kNotRegistered, {}});
        return;
    }
    pending_dn_ = dn;
    auto msg = nas::make_session_request(dn, qos);
    send_now(msg, false);
    await_response(msg, false,
                   {nas::MessageType::PduSessionEstablishmentAccept,
                    nas::MessageType::PduSessionEstablishmentReject});
}

void SimUe::start_release(const std::string& dn) {
    auto it = sessions_.find(dn);
    if (it == sessions_.end()) return;
    pending_dn_ = dn;
    auto msg = nas::make_session_release_request(it->second.session_id);
    send_now(msg, false);
    await_response(msg, false, {nas::MessageType::PduSessionReleaseComplete});
}

void SimUe::start_deregister() {
    send_now(nas::make_deregistration_request(), false);
    reg_state_ = UeRegState::Idle;
    sessions_.clear();
    awaiting_.reset();
    trace_state("Deregistered");
}

void SimUe::send_now(const nas::NasMessage& msg, bool initial) {
    auto encoded = nas::encode(msg);
    auto& rec = tracer_.append(sim_.now(), sim_.current_event(), kind::NasSend);
    rec["src"] = "ue:" + supi_.digits();
    rec["dst"] = "amf";
    rec["msg_type"] = nas::message_type_name(msg.type);
    rec["size"] = encoded.ok() ? encoded.value().size() : 0;
    rec["supi"] = supi_.digits();
    last_request_sent_us_ = sim_.now();
    if (send_) send_(*this, msg, initial);
}

void SimUe::await_response(const nas::NasMessage& sent, bool initial,
                           std::vector<nas::MessageType> expected) {
    awaiting_ = Awaiting{next_generation_++, sent, initial, std::move(expected), cfg_.retries};
    if (cfg_.retries > 0) arm_retry_timer();
}

void SimUe::arm_retry_timer() {
    const std::uint64_t generation = awaiting_->generation;
    sim_.after(cfg_.retry_timeout_us, [this, generation] {
        if (!awaiting_ || awaiting_->generation != generation || awaiting_->retries_left <= 0) return;
        awaiting_->retries_left--;
        send_now(awaiting_->resend, awaiting_->initial);
        arm_retry_timer();
    });
}

void SimUe::handle_downlink_nas(const nas::NasMessage& msg) {
    auto encoded_size = nas::encode(msg);
    auto& rec = tracer_.append(sim_.now(), sim_.current_event(), kind::NasRecv);
    rec["src"] = "amf";
    rec["dst"] = "ue:" + supi_.digits();
    rec["msg_type"] = nas::message_type_name(msg.type);
    rec["size"] = encoded_size.ok() ? encoded_size.value().size() : 0;
    rec["supi"] = supi_.digits();

    if (awaiting_ && std::find(awaiting_->expected.begin(), awaiting_->expected.end(), msg.type) !=
                         awaiting_->expected.end())
        awaiting_.reset();

    switch (msg.type) {
        case nas::MessageType::AuthenticationRequest: {
            if (reg_state_ != UeRegState::AuthWait && reg_state_ != UeRegState::AcceptWait) return;
            exchanges_us_.push_back(sim_.now() - reg_start_us_);
            const auto* nonce = msg.find_ie(nas::ie::kAuthNonce);
            const auto* seq = msg.find_ie(nas::ie::kAuthSeq);
            const auto challenge = auth::auth_challenge_bytes(nonce->value, nas::read_u32_be(seq->value));
            const auto digest = auth::compute_auth_response(key_, challenge);
            reg_state_ = UeRegState::AcceptWait;
            auto response = nas::make_authentication_response(digest);
            sim_.after(cfg_.processing_us, [this, response] {
                send_now(response, false);
                await_response(response, false,
                               {nas::MessageType::RegistrationAccept, nas::MessageType::RegistrationReject});
            });
            break;
        }
        case nas::MessageType::RegistrationAccept: {
            if (reg_state_ == UeRegState::Registered) return;  // duplicate accept
            if (reg_state_ != UeRegState::AcceptWait) return;
            exchanges_us_.push_back(sim_.now() - last_request_sent_us_);
            reg_state_ = UeRegState::Registered;
            trace_state("Registered");
            sim_.after(cfg_.processing_us,
                       [this] { send_now(nas::make_registration_complete(), false); });
            if (notify_) notify_(*this, {Notification::Kind::Registered, "", 0, {}});
            break;
        }
        case nas::MessageType::RegistrationReject: {
            const auto* cause = msg.find_ie(nas::ie::kCause);
            reg_state_ = UeRegState::Idle;
            sessions_.clear();
            if (notify_)
                notify_(*this, {Notification::Kind::RegistrationRejected, "",
                                cause->value.empty() ? std::uint8_t{0} : cause->value[0], {}});
            break;
        }
        case nas::MessageType::PduSessionEstablishmentAccept: {
            UeSessionInfo info;
            info.session_id = nas::read_u32_be(msg.find_ie(nas::ie::kSessionId)->value);
            info.ue_ip = nas::read_u32_be(msg.find_ie(nas::ie::kUeIpv4)->value);
            const auto& qos = msg.find_ie(nas::ie::kQosClass)->value;
            info.qos_class = qos.empty() ? 0 : qos[0];
            if (const auto* tun = msg.find_ie(nas::ie::kTunnelId))
                info.tunnel_id = nas::read_u32_be(tun->value);
            sessions_[pending_dn_] = info;
            if (notify_) notify_(*this, {Notification::Kind::SessionAccepted, pending_dn_, 0, info});
            break;
        }
        case nas::MessageType::PduSessionEstablishmentReject: {
            const auto* cause = msg.find_ie(nas::ie::kCause);
            if (notify_)
                notify_(*this, {Notification::Kind::SessionRejected, pending_dn_,
                                cause->value.empty() ? std::uint8_t{0} : cause->value[0], {}});
            break;
        }
        case nas::MessageType::PduSessionReleaseComplete: {
            const std::uint32_t session_id = nas::read_u32_be(msg.find_ie(nas::ie::kSessionId)->value);
            UeSessionInfo released{};
            for (auto it = sessions_.begin(); it != sessions_.end(); ++it) {
                if (it->second.session_id == session_id) {
                    released = it->second;
                    sessions_.erase(it);
                    break;
                }
            }
            if (notify_) notify_(*this, {Notification::Kind::ReleaseCompleted, pending_dn_, 0, released});
            break;
        }
        default:
            break;
    }
}

void SimUe::trace_state(const char* state) {
    auto& rec = tracer_.append(sim_.now(), sim_.current_event(), kind::UeState);
    rec["side"] = "ue";
    rec["supi"] = supi_.digits();
    rec["state"] = state;
}

}  // namespace orbit5gc
