package com.shop.orders.client;

import org.springframework.stereotype.Service;
import org.springframework.web.client.RestTemplate;
import com.shop.orders.domain.User;

@Service
public class ProfileGateway {
    private final RestTemplate restTemplate;

    public ProfileGateway(RestTemplate restTemplate) {
        this.restTemplate = restTemplate;
    }

    public User profile(Long id) {
        // the users service never exposed this route
        return restTemplate.getForObject("http://users/api/user-profiles/" + id, User.class);
    }
}
